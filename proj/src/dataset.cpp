#include "uroc/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>

#include "uroc/error.hpp"
#include "uroc/text.hpp"

namespace uroc {

EmbeddingDataset EmbeddingDataset::from_records(
    std::vector<RawRecord> records) {
  if (records.empty()) throw InputError("dataset has no records");

  const std::size_t dim = records.front().embedding.size();
  if (dim == 0) throw InputError("embedding dimension is zero");

  std::map<std::int64_t, std::vector<std::size_t>> by_identity;
  std::map<std::int64_t, int> attribute_index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RawRecord& r = records[i];
    if (r.embedding.size() != dim) {
      throw InputError("dimension mismatch: image '" + r.image_id + "' has " +
                       std::to_string(r.embedding.size()) +
                       " components, expected " + std::to_string(dim));
    }
    double norm2 = 0.0;
    for (float x : r.embedding) {
      if (!std::isfinite(x)) {
        throw InputError("non-finite embedding component in image '" +
                         r.image_id + "'");
      }
      norm2 += static_cast<double>(x) * x;
    }
    if (norm2 == 0.0) {
      throw InputError("zero-norm embedding for image '" + r.image_id + "'");
    }
    by_identity[r.identity].push_back(i);
    attribute_index.emplace(r.attribute, 0);
  }

  EmbeddingDataset ds;
  ds.dimension_ = dim;
  int next = 0;
  for (auto& [label, index] : attribute_index) {
    index = next++;
    ds.attribute_labels_.push_back(label);
  }

  ds.offsets_.push_back(0);
  ds.values_.reserve(records.size() * dim);
  ds.image_ids_.reserve(records.size());
  for (const auto& [label, members] : by_identity) {
    if (members.size() < 2) {
      throw InputError("identity " + std::to_string(label) +
                       " has fewer than 2 images");
    }
    const std::int64_t attribute = records[members.front()].attribute;
    for (std::size_t i : members) {
      RawRecord& r = records[i];
      if (r.attribute != attribute) {
        throw InputError("inconsistent attribute for identity " +
                         std::to_string(label) + ": " +
                         std::to_string(attribute) + " vs " +
                         std::to_string(r.attribute));
      }
      ds.values_.insert(ds.values_.end(), r.embedding.begin(),
                        r.embedding.end());
      ds.image_ids_.push_back(std::move(r.image_id));
    }
    ds.offsets_.push_back(ds.image_ids_.size());
    ds.identity_labels_.push_back(label);
    ds.identity_attributes_.push_back(attribute_index.at(attribute));
  }
  return ds;
}

std::vector<RawRecord> EmbeddingDataset::records() const {
  std::vector<RawRecord> out;
  out.reserve(size());
  for (std::size_t k = 0; k < identity_count(); ++k) {
    for (std::size_t i = offsets_[k]; i < offsets_[k + 1]; ++i) {
      const auto e = embedding(i);
      out.push_back({image_ids_[i], identity_labels_[k],
                     attribute_labels_[static_cast<std::size_t>(
                         identity_attributes_[k])],
                     std::vector<float>(e.begin(), e.end())});
    }
  }
  return out;
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw InputError("dimension mismatch in cosine similarity");
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i];
    const double b = v[i];
    dot += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0.0 || vv == 0.0) {
    throw InputError("zero-norm embedding in cosine similarity");
  }
  return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

EmbeddingDataset parse_embeddings_csv(std::string_view csv) {
  const auto rows = text::lines(csv);
  if (rows.empty()) throw InputError("empty embedding CSV");

  const auto header = text::split_fields(rows.front().second);
  if (header.size() < 4 || header[0] != "image_id" ||
      header[1] != "identity" || header[2] != "attribute") {
    throw InputError(
        "malformed header: expected image_id,identity,attribute,e0,...");
  }
  const std::size_t dim = header.size() - 3;

  std::vector<RawRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [number, line] = rows[r];
    const std::string where = "line " + std::to_string(number);
    const auto fields = text::split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError("malformed row: " + where + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    RawRecord rec;
    rec.image_id = std::string(fields[0]);
    rec.identity = text::parse_int(fields[1], where);
    rec.attribute = text::parse_int(fields[2], where);
    rec.embedding.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      rec.embedding[j] = text::parse_float(fields[3 + j], where);
    }
    records.push_back(std::move(rec));
  }
  return EmbeddingDataset::from_records(std::move(records));
}

std::string embeddings_to_csv(const EmbeddingDataset& ds) {
  std::string out = "image_id,identity,attribute";
  for (std::size_t j = 0; j < ds.dimension(); ++j) {
    out += ",e" + std::to_string(j);
  }
  out += '\n';
  for (const RawRecord& r : ds.records()) {
    out += r.image_id;
    out += ',' + std::to_string(r.identity);
    out += ',' + std::to_string(r.attribute);
    for (float x : r.embedding) {
      out += ',';
      out += text::format_float(x);
    }
    out += '\n';
  }
  return out;
}

namespace {

constexpr std::string_view kMagic = "UROC1";

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw InputError("malformed binary embedding file: truncated");
    }
  }
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
  }
}

std::uint32_t checked_u32(std::int64_t v, const char* what) {
  if (v < 0 || v > 0xffffffffLL) {
    throw InputError(std::string(what) +
                     " label does not fit the binary format: " +
                     std::to_string(v));
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

EmbeddingDataset parse_embeddings_binary(std::span<const std::byte> bytes) {
  ByteReader in(bytes);
  if (in.str(kMagic.size()) != kMagic) {
    throw InputError("malformed binary embedding file: bad magic");
  }
  const std::uint32_t n = in.u32();
  const std::uint32_t d = in.u32();
  std::vector<RawRecord> records(n);
  for (RawRecord& r : records) {
    r.identity = in.u32();
    r.attribute = in.u32();
    r.image_id = in.str(in.u32());
    r.embedding.resize(d);
    for (float& x : r.embedding) x = in.f32();
  }
  if (!in.done()) {
    throw InputError("malformed binary embedding file: trailing bytes");
  }
  return EmbeddingDataset::from_records(std::move(records));
}

std::vector<std::byte> embeddings_to_binary(const EmbeddingDataset& ds) {
  std::vector<std::byte> out;
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_u32(out, static_cast<std::uint32_t>(ds.size()));
  put_u32(out, static_cast<std::uint32_t>(ds.dimension()));
  for (const RawRecord& r : ds.records()) {
    put_u32(out, checked_u32(r.identity, "identity"));
    put_u32(out, checked_u32(r.attribute, "attribute"));
    put_u32(out, static_cast<std::uint32_t>(r.image_id.size()));
    for (char c : r.image_id) out.push_back(static_cast<std::byte>(c));
    for (float x : r.embedding) put_u32(out, std::bit_cast<std::uint32_t>(x));
  }
  return out;
}

EmbeddingFormat guess_format(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".bin" || ext == ".uroc") ? EmbeddingFormat::binary
                                           : EmbeddingFormat::csv;
}

EmbeddingDataset load_embeddings(const std::filesystem::path& path,
                                 EmbeddingFormat format) {
  const std::string contents = text::read_file(path);
  if (format == EmbeddingFormat::csv) return parse_embeddings_csv(contents);
  return parse_embeddings_binary(
      std::as_bytes(std::span(contents.data(), contents.size())));
}

void save_embeddings(const EmbeddingDataset& ds,
                     const std::filesystem::path& path,
                     EmbeddingFormat format) {
  if (format == EmbeddingFormat::csv) {
    text::write_file(path, embeddings_to_csv(ds));
    return;
  }
  const auto bytes = embeddings_to_binary(ds);
  text::write_file(path, std::string_view(
                             reinterpret_cast<const char*>(bytes.data()),
                             bytes.size()));
}

}  // namespace uroc

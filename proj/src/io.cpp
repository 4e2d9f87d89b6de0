#include "mrpt/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace mrpt {

namespace {

// Little-endian encoder over a growing byte buffer.
class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::is_floating_point_v<T>) {
      using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
      put(std::bit_cast<Bits>(value));
    } else {
      for (std::size_t b = 0; b < sizeof(T); ++b) {
        buf_.push_back(static_cast<char>(
            (static_cast<std::uint64_t>(value) >> (8 * b)) & 0xffu));
      }
    }
  }
  template <typename T>
  void put_all(const std::vector<T>& values) {
    for (const auto& v : values) put(v);
  }
  void raw(std::string_view bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }
  std::vector<char> take() { return std::move(buf_); }

 private:
  std::vector<char> buf_;
};

// Bounds-checked little-endian decoder.
class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if constexpr (std::is_floating_point_v<T>) {
      using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
      return std::bit_cast<T>(get<Bits>());
    } else {
      need(sizeof(T));
      std::uint64_t v = 0;
      for (std::size_t b = 0; b < sizeof(T); ++b) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b]))
             << (8 * b);
      }
      pos_ += sizeof(T);
      return static_cast<T>(v);
    }
  }
  template <typename T>
  std::vector<T> get_all(std::size_t count) {
    need(count, sizeof(T));
    std::vector<T> out(count);
    for (auto& v : out) v = get<T>();
    return out;
  }
  std::string_view raw(std::size_t count) {
    need(count);
    auto out = bytes_.substr(pos_, count);
    pos_ += count;
    return out;
  }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t count, std::size_t width = 1) const {
    if (width != 0 && count > remaining() / width) {
      throw FormatError("unexpected end of file at byte " + std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

constexpr std::string_view kIndexMagic{"MRPTIDX\0", 8};
constexpr std::string_view kTruthMagic{"MRPTGT\0\0", 8};
constexpr std::uint32_t kTruthVersion = 1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view text, const char* what) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError(std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::string format_float(float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Dataset load_xvecs(std::string_view bytes, bool byte_components) {
  Reader in(bytes);
  std::size_t dim = 0;
  std::size_t n = 0;
  std::vector<float> values;
  while (!in.done()) {
    const auto d = in.get<std::int32_t>();
    if (d <= 0) throw FormatError("record " + std::to_string(n) + " has dimension " + std::to_string(d));
    if (n == 0) {
      dim = static_cast<std::size_t>(d);
    } else if (static_cast<std::size_t>(d) != dim) {
      throw FormatError("record " + std::to_string(n) + " has dimension " +
                        std::to_string(d) + ", expected " + std::to_string(dim));
    }
    if (byte_components) {
      const auto raw = in.raw(dim);
      for (char c : raw) values.push_back(static_cast<float>(static_cast<unsigned char>(c)));
    } else {
      const auto row = in.get_all<float>(dim);
      values.insert(values.end(), row.begin(), row.end());
    }
    ++n;
  }
  if (n == 0) throw FormatError("vector file is empty");
  return Dataset(n, dim, std::move(values));
}

Dataset load_csv_vectors(std::string_view text) {
  const auto rows = parse_csv(text);
  std::size_t dim = 0;
  std::vector<float> values;
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (n == 0) {
      dim = row.size();
    } else if (row.size() != dim) {
      throw FormatError("csv row " + std::to_string(n) + " has " +
                        std::to_string(row.size()) + " fields, expected " +
                        std::to_string(dim));
    }
    for (const auto& field : row) values.push_back(parse_number<float>(field, "coordinate"));
    ++n;
  }
  if (n == 0) throw FormatError("csv file holds no points");
  return Dataset(n, dim, std::move(values));
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::size_t> parse_counts(std::string_view list) {
  std::vector<std::size_t> out;
  for (auto item : split(list, ',')) {
    item = trim(item);
    if (const auto colon = item.find(':'); colon != std::string_view::npos) {
      const auto lo = parse_number<std::size_t>(item.substr(0, colon), "range start");
      const auto hi = parse_number<std::size_t>(item.substr(colon + 1), "range end");
      if (hi < lo) throw FormatError("empty range '" + std::string(item) + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_number<std::size_t>(item, "grid value"));
    }
  }
  return out;
}

double parse_sparsity(std::string_view s) {
  s = trim(s);
  if (s.empty() || s == "auto") return 0.0;
  return parse_number<double>(s, "sparsity");
}

}  // namespace

VectorFormat parse_vector_format(std::string_view name) {
  if (name == "fvecs") return VectorFormat::fvecs;
  if (name == "bvecs") return VectorFormat::bvecs;
  if (name == "csv") return VectorFormat::csv;
  throw ParameterError("unknown vector format '" + std::string(name) + "'");
}

VectorFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext.empty()) throw ParameterError("cannot infer vector format of " + path.string());
  return parse_vector_format(std::string_view(ext).substr(1));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

Dataset load_vectors(const std::filesystem::path& path, VectorFormat format) {
  const auto bytes = read_file(path);
  switch (format) {
    case VectorFormat::fvecs: return load_xvecs(bytes, false);
    case VectorFormat::bvecs: return load_xvecs(bytes, true);
    case VectorFormat::csv: return load_csv_vectors(bytes);
  }
  throw ParameterError("unknown vector format");
}

Dataset load_vectors(const std::filesystem::path& path) {
  return load_vectors(path, format_from_extension(path));
}

void save_vectors(const Dataset& data, const std::filesystem::path& path,
                  VectorFormat format) {
  if (format == VectorFormat::csv) {
    std::string text;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto row = data.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) text += ',';
        text += format_float(row[j]);
      }
      text += '\n';
    }
    write_file_atomic(path, text);
    return;
  }
  Writer out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.put(static_cast<std::int32_t>(data.dim()));
    for (float v : data.row(i)) {
      if (format == VectorFormat::fvecs) {
        out.put(v);
      } else {
        if (v < 0.0f || v > 255.0f || v != static_cast<float>(static_cast<int>(v))) {
          throw ParameterError("bvecs can only hold integers in [0, 255]");
        }
        out.put(static_cast<std::uint8_t>(v));
      }
    }
  }
  const auto bytes = out.take();
  write_file_atomic(path, {bytes.data(), bytes.size()});
}

std::vector<char> serialize_index(const MRPTIndex& index) {
  Writer out;
  out.raw(kIndexMagic);
  out.put(kIndexFormatVersion);
  out.put(static_cast<std::uint64_t>(index.n));
  out.put(static_cast<std::uint64_t>(index.d));
  out.put(static_cast<std::uint32_t>(index.params.trees));
  out.put(static_cast<std::uint32_t>(index.params.depth));
  out.put(index.params.sparsity);
  out.put(index.params.seed);
  out.put(static_cast<std::uint32_t>(index.params.mode));
  out.put(index.dataset_checksum);
  for (const auto& tree : index.trees) {
    out.put(static_cast<std::uint64_t>(tree.matrix.nnz()));
    for (auto off : tree.matrix.col_offsets) out.put(static_cast<std::uint64_t>(off));
    out.put_all(tree.matrix.row_ids);
    out.put_all(tree.matrix.values);
    out.put_all(tree.splits);
    out.put_all(tree.leaf_offsets);
    out.put_all(tree.leaf_indices);
  }
  return out.take();
}

MRPTIndex deserialize_index(std::string_view bytes) {
  Reader in(bytes);
  if (in.remaining() < kIndexMagic.size() || in.raw(kIndexMagic.size()) != kIndexMagic) {
    throw FormatError("not an index file (bad magic)");
  }
  if (const auto version = in.get<std::uint32_t>(); version != kIndexFormatVersion) {
    throw FormatError("unsupported index format version " + std::to_string(version));
  }
  MRPTIndex index;
  index.n = in.get<std::uint64_t>();
  index.d = in.get<std::uint64_t>();
  index.params.trees = in.get<std::uint32_t>();
  index.params.depth = in.get<std::uint32_t>();
  index.params.sparsity = in.get<double>();
  index.params.seed = in.get<std::uint64_t>();
  const auto mode = in.get<std::uint32_t>();
  if (mode > 1) throw FormatError("unknown sparsity mode " + std::to_string(mode));
  index.params.mode = static_cast<SparsityMode>(mode);
  index.dataset_checksum = in.get<std::uint64_t>();

  const auto depth = index.params.depth;
  if (depth == 0 || depth > 31 || index.n == 0 || index.d == 0 ||
      index.params.trees == 0 || max_depth(index.n) < depth) {
    throw FormatError("index header holds inconsistent parameters");
  }
  const std::size_t leaves = std::size_t{1} << depth;
  index.trees.resize(index.params.trees);
  for (auto& tree : index.trees) {
    tree.depth = depth;
    tree.matrix.rows = index.d;
    tree.matrix.cols = depth;
    const auto nnz = in.get<std::uint64_t>();
    const auto offsets = in.get_all<std::uint64_t>(depth + 1);
    tree.matrix.col_offsets.assign(offsets.begin(), offsets.end());
    tree.matrix.row_ids = in.get_all<std::uint32_t>(nnz);
    tree.matrix.values = in.get_all<float>(nnz);
    tree.splits = in.get_all<float>(leaves - 1);
    tree.leaf_offsets = in.get_all<std::uint32_t>(leaves + 1);
    tree.leaf_indices = in.get_all<PointId>(index.n);

    if (offsets.front() != 0 || offsets.back() != nnz ||
        !std::is_sorted(offsets.begin(), offsets.end())) {
      throw FormatError("corrupt sparse matrix offsets");
    }
    if (std::any_of(tree.matrix.row_ids.begin(), tree.matrix.row_ids.end(),
                    [&](std::uint32_t r) { return r >= index.d; })) {
      throw FormatError("sparse matrix row id out of range");
    }
    if (tree.leaf_offsets.front() != 0 || tree.leaf_offsets.back() != index.n ||
        !std::is_sorted(tree.leaf_offsets.begin(), tree.leaf_offsets.end())) {
      throw FormatError("corrupt leaf offsets");
    }
    if (std::any_of(tree.leaf_indices.begin(), tree.leaf_indices.end(),
                    [&](PointId i) { return i >= index.n; })) {
      throw FormatError("leaf index out of range");
    }
  }
  if (!in.done()) throw FormatError("trailing bytes after index data");
  return index;
}

void save_index(const MRPTIndex& index, const std::filesystem::path& path) {
  const auto bytes = serialize_index(index);
  write_file_atomic(path, {bytes.data(), bytes.size()});
}

MRPTIndex load_index(const std::filesystem::path& path, const Dataset& data) {
  auto index = deserialize_index(read_file(path));
  if (index.n != data.size() || index.d != data.dim() ||
      index.dataset_checksum != dataset_checksum(data)) {
    throw ChecksumError("index " + path.string() +
                        " was built over a different dataset");
  }
  return index;
}

void save_ground_truth(const GroundTruth& truth,
                       const std::filesystem::path& path) {
  Writer out;
  out.raw(kTruthMagic);
  out.put(kTruthVersion);
  out.put(static_cast<std::uint64_t>(truth.k));
  out.put(truth.data_checksum);
  out.put(truth.query_checksum);
  out.put(static_cast<std::uint64_t>(truth.neighbors.size()));
  for (const auto& list : truth.neighbors) {
    out.put(static_cast<std::uint64_t>(list.size()));
    for (const auto& nb : list) {
      out.put(nb.index);
      out.put(nb.distance);
    }
  }
  const auto bytes = out.take();
  write_file_atomic(path, {bytes.data(), bytes.size()});
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  Reader in(bytes);
  if (in.remaining() < kTruthMagic.size() || in.raw(kTruthMagic.size()) != kTruthMagic) {
    throw FormatError("not a ground-truth file (bad magic)");
  }
  if (in.get<std::uint32_t>() != kTruthVersion) {
    throw FormatError("unsupported ground-truth version");
  }
  GroundTruth truth;
  truth.k = in.get<std::uint64_t>();
  truth.data_checksum = in.get<std::uint64_t>();
  truth.query_checksum = in.get<std::uint64_t>();
  const auto nq = in.get<std::uint64_t>();
  if (nq > in.remaining() / 8) throw FormatError("ground-truth query count too large");
  truth.neighbors.resize(nq);
  for (auto& list : truth.neighbors) {
    const auto count = in.get<std::uint64_t>();
    if (count > truth.k || count > in.remaining() / 12) {
      throw FormatError("ground-truth list length out of range");
    }
    list.resize(count);
    for (auto& nb : list) {
      nb.index = in.get<std::uint32_t>();
      nb.distance = in.get<double>();
    }
  }
  if (!in.done()) throw FormatError("trailing bytes after ground truth");
  return truth;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default:
        field += c;
        any = true;
    }
  }
  if (quoted) throw FormatError("unterminated quoted csv field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvRow> benchmark_csv_rows(
    const std::vector<BenchmarkRecord>& records) {
  std::vector<CsvRow> rows;
  rows.push_back({"T", "depth", "sparsity", "votes", "k", "recall", "qtime_s",
                  "mean_candidates", "build_s"});
  for (const auto& r : records) {
    if (!r.ok()) continue;
    rows.push_back({std::to_string(r.trees), std::to_string(r.depth),
                    format_double(r.sparsity), std::to_string(r.votes),
                    std::to_string(r.k), format_double(r.recall),
                    format_double(r.query_seconds),
                    format_double(r.mean_candidates),
                    format_double(r.build_seconds)});
  }
  return rows;
}

std::vector<CsvRow> neighbor_csv_rows(const std::vector<NeighborList>& lists) {
  std::vector<CsvRow> rows;
  rows.push_back({"query", "rank", "index", "distance"});
  for (std::size_t q = 0; q < lists.size(); ++q) {
    for (std::size_t r = 0; r < lists[q].size(); ++r) {
      rows.push_back({std::to_string(q), std::to_string(r),
                      std::to_string(lists[q][r].index),
                      format_double(lists[q][r].distance)});
    }
  }
  return rows;
}

std::vector<GridPoint> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw FormatError("empty grid description");

  std::vector<GridPoint> grid;
  const bool inline_form = text.find('=') != std::string_view::npos;
  if (!inline_form) {
    const auto rows = parse_csv(text);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows.front().size(); ++i) {
      col[std::string(trim(rows.front()[i]))] = i;
    }
    for (const char* key : {"T", "depth", "votes"}) {
      if (!col.contains(key)) {
        throw FormatError(std::string("grid csv lacks column '") + key + "'");
      }
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() == 1 && trim(row[0]).empty()) continue;
      if (row.size() != rows.front().size()) {
        throw FormatError("grid csv row " + std::to_string(r) + " has wrong width");
      }
      GridPoint p;
      p.trees = parse_number<std::size_t>(row[col["T"]], "T");
      p.depth = parse_number<std::size_t>(row[col["depth"]], "depth");
      p.votes = parse_number<std::size_t>(row[col["votes"]], "votes");
      p.sparsity = col.contains("sparsity") ? parse_sparsity(row[col["sparsity"]]) : 0.0;
      grid.push_back(p);
    }
    if (grid.empty()) throw FormatError("grid csv has no rows");
    return grid;
  }

  std::vector<std::size_t> trees, depths, votes;
  std::vector<double> sparsities{0.0};
  for (auto part : split(text, ';')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("grid term '" + std::string(part) + "' lacks '='");
    }
    const auto key = trim(part.substr(0, eq));
    const auto value = part.substr(eq + 1);
    if (key == "T" || key == "trees") {
      trees = parse_counts(value);
    } else if (key == "depth" || key == "L") {
      depths = parse_counts(value);
    } else if (key == "votes" || key == "v") {
      votes = parse_counts(value);
    } else if (key == "sparsity" || key == "a") {
      sparsities.clear();
      for (auto item : split(value, ',')) sparsities.push_back(parse_sparsity(item));
    } else {
      throw FormatError("unknown grid key '" + std::string(key) + "'");
    }
  }
  if (trees.empty() || depths.empty() || votes.empty()) {
    throw FormatError("grid needs T, depth and votes");
  }
  for (auto t : trees)
    for (auto l : depths)
      for (auto a : sparsities)
        for (auto v : votes) grid.push_back({t, l, a, v});
  return grid;
}

}  // namespace mrpt

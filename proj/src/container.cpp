#include "drbench/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "drbench/errors.hpp"

namespace drbench {

namespace {

static_assert(std::endian::native == std::endian::little,
              "container writer assumes a little-endian host");

constexpr char kMatrixMagic[4] = {'D', 'R', 'M', 'X'};
constexpr char kDatasetMagic[4] = {'D', 'R', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : path_(path.string()), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write " + path_);
  }

  template <typename T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  void put_bytes(const void* data, std::size_t size) {
    out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  }

  void finish() {
    out_.flush();
    if (!out_) throw IoError("short write to " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : path_(path.string()), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path_);
  }

  template <typename T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw IoError("truncated container " + path_);
    return value;
  }

  void get_bytes(void* data, std::size_t size) {
    in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(size));
    if (!in_) throw IoError("truncated container " + path_);
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

void write_header(Writer& w, const char magic[4], std::uint8_t kind) {
  w.put_bytes(magic, 4);
  w.put(kVersion);
  w.put(kind);
}

std::uint8_t read_header(Reader& r, const char magic[4]) {
  char got[4];
  r.get_bytes(got, 4);
  if (std::memcmp(got, magic, 4) != 0) {
    throw IoError("bad magic in " + r.path());
  }
  auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw IoError("unsupported container version " + std::to_string(version) +
                  " in " + r.path());
  }
  return r.get<std::uint8_t>();
}

void write_matrix_block(Writer& w, const Matrix& m) {
  w.put(static_cast<std::uint64_t>(m.rows()));
  w.put(static_cast<std::uint64_t>(m.cols()));
  w.put_bytes(m.data().data(), m.data().size() * sizeof(double));
}

Matrix read_matrix_block(Reader& r) {
  auto rows = r.get<std::uint64_t>();
  auto cols = r.get<std::uint64_t>();
  if (rows > (1u << 24) || cols > (1u << 24)) {
    throw IoError("implausible matrix shape in " + r.path());
  }
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  r.get_bytes(m.data().data(), m.data().size() * sizeof(double));
  return m;
}

void write_vector_block(Writer& w, const Vector& v) {
  w.put_bytes(v.data(), static_cast<std::size_t>(v.dim()) * sizeof(double));
}

Vector read_vector_block(Reader& r, int dim) {
  Vector v(dim);
  r.get_bytes(v.data(), static_cast<std::size_t>(dim) * sizeof(double));
  return v;
}

}  // namespace

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  Writer w(path);
  write_header(w, kMatrixMagic, 0);
  write_matrix_block(w, m);
  w.finish();
}

Matrix load_matrix(const std::filesystem::path& path) {
  Reader r(path);
  if (read_header(r, kMatrixMagic) != 0) {
    throw IoError("not a raw matrix container: " + path.string());
  }
  return read_matrix_block(r);
}

void save_projection(const std::filesystem::path& path, const ProjectionMatrix& pm) {
  Writer w(path);
  write_header(w, kMatrixMagic, 1);
  w.put(static_cast<std::uint8_t>(pm.spec.method));
  w.put(static_cast<std::uint64_t>(pm.spec.d));
  w.put(static_cast<std::uint64_t>(pm.spec.k));
  w.put(pm.spec.seed);
  w.put(static_cast<std::uint8_t>(pm.spec.center ? 1 : 0));
  w.put(static_cast<std::uint8_t>(pm.sampling ? 1 : 0));
  if (pm.sampling) {
    for (int idx : pm.sampling->phi) w.put(static_cast<std::uint64_t>(idx));
  }
  write_matrix_block(w, pm.p);
  w.put(static_cast<std::uint8_t>(pm.mean ? 1 : 0));
  if (pm.mean) write_vector_block(w, *pm.mean);
  w.finish();
}

ProjectionMatrix load_projection(const std::filesystem::path& path) {
  Reader r(path);
  if (read_header(r, kMatrixMagic) != 1) {
    throw IoError("not a projection container: " + path.string());
  }
  ProjectionMatrix pm;
  pm.spec.method = static_cast<Method>(r.get<std::uint8_t>());
  pm.spec.d = static_cast<int>(r.get<std::uint64_t>());
  pm.spec.k = static_cast<int>(r.get<std::uint64_t>());
  pm.spec.seed = r.get<std::uint64_t>();
  pm.spec.center = r.get<std::uint8_t>() != 0;
  bool has_phi = r.get<std::uint8_t>() != 0;
  if (has_phi) {
    SamplingIndex index;
    index.d = pm.spec.d;
    index.k = pm.spec.k;
    index.phi.reserve(static_cast<std::size_t>(pm.spec.k));
    for (int i = 0; i < pm.spec.k; ++i) {
      index.phi.push_back(static_cast<int>(r.get<std::uint64_t>()));
    }
    pm.sampling = std::move(index);
  }
  pm.p = read_matrix_block(r);
  if (r.get<std::uint8_t>() != 0) pm.mean = read_vector_block(r, pm.spec.d);
  return pm;
}

void save_reconstruction(const std::filesystem::path& path,
                         const ReconstructionMatrix& rm) {
  Writer w(path);
  write_header(w, kMatrixMagic, 2);
  w.put(static_cast<std::uint8_t>(rm.kind));
  w.put(static_cast<std::uint32_t>(rm.attacker_dataset_id.size()));
  w.put_bytes(rm.attacker_dataset_id.data(), rm.attacker_dataset_id.size());
  w.put(static_cast<std::uint8_t>(rm.intercept ? 1 : 0));
  w.put(static_cast<std::uint8_t>(rm.mean ? 1 : 0));
  write_matrix_block(w, rm.q);
  if (rm.intercept) write_vector_block(w, *rm.intercept);
  if (rm.mean) write_vector_block(w, *rm.mean);
  w.finish();
}

ReconstructionMatrix load_reconstruction(const std::filesystem::path& path) {
  Reader r(path);
  if (read_header(r, kMatrixMagic) != 2) {
    throw IoError("not a reconstruction container: " + path.string());
  }
  ReconstructionMatrix rm;
  rm.kind = static_cast<AttackKind>(r.get<std::uint8_t>());
  auto id_len = r.get<std::uint32_t>();
  if (id_len > 4096) throw IoError("implausible id length in " + path.string());
  rm.attacker_dataset_id.resize(id_len);
  if (id_len > 0) r.get_bytes(rm.attacker_dataset_id.data(), id_len);
  bool has_intercept = r.get<std::uint8_t>() != 0;
  bool has_mean = r.get<std::uint8_t>() != 0;
  rm.q = read_matrix_block(r);
  if (has_intercept) rm.intercept = read_vector_block(r, rm.q.rows());
  if (has_mean) rm.mean = read_vector_block(r, rm.q.rows());
  return rm;
}

void save_dataset_cache(const std::filesystem::path& path, const LabeledDataset& ds) {
  Writer w(path);
  w.put_bytes(kDatasetMagic, 4);
  w.put(kVersion);
  w.put(static_cast<std::uint64_t>(ds.size()));
  w.put(static_cast<std::uint64_t>(ds.dim()));
  w.put(static_cast<std::uint32_t>(ds.class_count));
  for (double v : ds.xs.data()) w.put(static_cast<float>(v));
  for (int label : ds.labels) w.put(static_cast<std::int32_t>(label));
  w.finish();
}

LabeledDataset load_dataset_cache(const std::filesystem::path& path) {
  Reader r(path);
  char got[4];
  r.get_bytes(got, 4);
  if (std::memcmp(got, kDatasetMagic, 4) != 0) {
    throw IoError("bad magic in " + path.string());
  }
  auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw IoError("unsupported dataset cache version in " + path.string());
  }
  auto n = r.get<std::uint64_t>();
  auto d = r.get<std::uint64_t>();
  auto classes = r.get<std::uint32_t>();
  if (n > (1u << 26) || d > (1u << 24)) {
    throw IoError("implausible dataset shape in " + path.string());
  }

  LabeledDataset ds;
  ds.name = path.stem().string();
  ds.class_count = static_cast<int>(classes);
  ds.xs = Matrix(static_cast<int>(n), static_cast<int>(d));
  for (double& v : ds.xs.data()) v = r.get<float>();
  ds.labels.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) ds.labels.push_back(r.get<std::int32_t>());
  ds.validate();
  return ds;
}

}  // namespace drbench

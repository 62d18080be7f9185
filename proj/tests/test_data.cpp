#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "drbench/classify.hpp"
#include "drbench/container.hpp"
#include "drbench/dataset.hpp"
#include "drbench/errors.hpp"
#include "drbench/image.hpp"
#include "drbench/rng.hpp"

using namespace drbench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("drbench_test_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_pgm_bytes(const fs::path& file, int w, int h,
                     const std::vector<unsigned char>& bytes) {
  std::ofstream out(file, std::ios::binary);
  out << "P5\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// A small class tree of constant-intensity images.
void write_image_tree(const fs::path& root, int classes, int per_class, int side) {
  for (int c = 0; c < classes; ++c) {
    fs::path dir = root / ("person_" + std::to_string(c < 10 ? 0 : c / 10) +
                           std::to_string(c % 10));
    fs::create_directories(dir);
    for (int i = 0; i < per_class; ++i) {
      std::vector<unsigned char> bytes(static_cast<std::size_t>(side) * side,
                                       static_cast<unsigned char>(40 + 5 * c + i));
      write_pgm_bytes(dir / ("img_" + std::to_string(i) + ".pgm"), side, side, bytes);
    }
  }
}

}  // namespace

TEST_CASE("pnm readers and writer round-trip") {
  TempDir tmp("pnm");

  // P2 ascii graymap.
  {
    std::ofstream out(tmp.path / "a.pgm");
    out << "P2\n# a comment\n2 2\n255\n0 128\n255 64\n";
  }
  GrayImage img = read_pnm(tmp.path / "a.pgm");
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.at(0, 1) == doctest::Approx(128.0 / 255.0));
  CHECK(img.at(1, 0) == doctest::Approx(1.0));

  // P3 ascii color converted via luma.
  {
    std::ofstream out(tmp.path / "b.ppm");
    out << "P3\n1 1\n255\n255 0 0\n";
  }
  GrayImage red = read_pnm(tmp.path / "b.ppm");
  CHECK(red.at(0, 0) == doctest::Approx(0.299));

  // P5 writer round-trips through the reader.
  GrayImage gray;
  gray.width = 3;
  gray.height = 2;
  gray.pixels = {0.0, 0.25, 0.5, 0.75, 1.0, 0.1};
  write_pgm(tmp.path / "c.pgm", gray);
  GrayImage back = read_pnm(tmp.path / "c.pgm");
  REQUIRE(back.pixels.size() == gray.pixels.size());
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
    CHECK(back.pixels[i] == doctest::Approx(gray.pixels[i]).epsilon(0.01));
  }

  // 16-bit maxval.
  {
    std::ofstream out(tmp.path / "d.pgm");
    out << "P2\n1 1\n65535\n32768\n";
  }
  CHECK(read_pnm(tmp.path / "d.pgm").at(0, 0) == doctest::Approx(32768.0 / 65535.0));

  CHECK_THROWS_AS(read_pnm(tmp.path / "missing.pgm"), IoError);
  {
    std::ofstream out(tmp.path / "e.txt");
    out << "not an image";
  }
  CHECK_THROWS_AS(read_pnm(tmp.path / "e.txt"), IoError);
}

TEST_CASE("bilinear resize matches the hand-computed oracle") {
  // 2x2 checkerboard upscaled to 4x4 under half-pixel centers; weights
  // t in {0, 0.25, 0.75, 1} per axis, value = (1-ty)(1-tx)*a + ... .
  GrayImage board;
  board.width = 2;
  board.height = 2;
  board.pixels = {1.0, 0.0, 0.0, 1.0};
  GrayImage up = resize_bilinear(board, 4, 4);
  const double expected[4][4] = {
      {1.0, 0.75, 0.25, 0.0},
      {0.75, 0.625, 0.375, 0.25},
      {0.25, 0.375, 0.625, 0.75},
      {0.0, 0.25, 0.75, 1.0},
  };
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      CHECK(up.at(y, x) == doctest::Approx(expected[y][x]).epsilon(1e-6));

  // Identity resize is exact.
  GrayImage same = resize_bilinear(board, 2, 2);
  CHECK(std::memcmp(same.pixels.data(), board.pixels.data(),
                    board.pixels.size() * sizeof(double)) == 0);
}

TEST_CASE("load_image_dir shapes, values and determinism") {
  TempDir tmp("tree");
  write_image_tree(tmp.path, 3, 4, 32);
  LabeledDataset ds = load_image_dir(tmp.path, 28);
  CHECK(ds.size() == 12);
  CHECK(ds.dim() == 784);  // 28x28
  CHECK(ds.class_count == 3);

  // Constant images stay constant after resizing.
  double v0 = ds.xs(0, 0);
  for (int j = 0; j < ds.dim(); ++j) CHECK(ds.xs(0, j) == doctest::Approx(v0));
  CHECK(v0 == doctest::Approx(40.0 / 255.0));

  LabeledDataset again = load_image_dir(tmp.path, 28);
  CHECK(std::memcmp(ds.xs.data().data(), again.xs.data().data(),
                    ds.xs.data().size() * sizeof(double)) == 0);
  CHECK(ds.labels == again.labels);
}

TEST_CASE("load_image_dir error cases") {
  TempDir tmp("tree_bad");
  write_image_tree(tmp.path, 2, 2, 8);
  fs::create_directories(tmp.path / "person_99");  // empty class dir
  CHECK_THROWS_AS(load_image_dir(tmp.path, 8), IoError);

  TempDir tmp2("tree_bad2");
  write_image_tree(tmp2.path, 2, 2, 8);
  {
    std::ofstream out(tmp2.path / "person_00" / "notes.txt");
    out << "junk";
  }
  try {
    load_image_dir(tmp2.path, 8);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("notes.txt") != std::string::npos);
  }

  CHECK_THROWS_AS(load_image_dir(tmp.path / "nope", 8), IoError);
}

TEST_CASE("cifar batch loader") {
  TempDir tmp("cifar");
  // Two records: a red image labeled 3 and a gray image labeled 7.
  std::vector<unsigned char> blob;
  auto push_record = [&](unsigned char label, unsigned char r, unsigned char g,
                         unsigned char b) {
    blob.push_back(label);
    for (int i = 0; i < 1024; ++i) blob.push_back(r);
    for (int i = 0; i < 1024; ++i) blob.push_back(g);
    for (int i = 0; i < 1024; ++i) blob.push_back(b);
  };
  push_record(3, 255, 0, 0);
  push_record(7, 128, 128, 128);
  {
    std::ofstream out(tmp.path / "batch.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size()));
  }

  LabeledDataset ds = load_cifar_batches({tmp.path / "batch.bin"}, 16);
  CHECK(ds.size() == 2);
  CHECK(ds.dim() == 256);
  CHECK(ds.class_count == 10);
  CHECK(ds.labels == std::vector<int>{3, 7});
  CHECK(ds.xs(0, 0) == doctest::Approx(0.299));
  CHECK(ds.xs(1, 0) == doctest::Approx(128.0 / 255.0));

  {
    std::ofstream out(tmp.path / "short.bin", std::ios::binary);
    out.write("abc", 3);
  }
  CHECK_THROWS_AS(load_cifar_batches({tmp.path / "short.bin"}, 16), IoError);
}

TEST_CASE("split_by_class partitions classes disjointly") {
  LabeledDataset ds = synth_faces(38, 64, 49, 7, 5.0);
  SplitSpec spec;
  spec.class_partition_seed = 5;
  spec.classes_per_side = 19;
  auto [main_ds, sub_ds] = split_by_class(ds, spec);
  CHECK(main_ds.class_count == 19);
  CHECK(sub_ds.class_count == 19);
  CHECK(main_ds.size() == 1216);
  CHECK(sub_ds.size() == 1216);

  auto [main2, sub2] = split_by_class(ds, spec);
  CHECK(std::memcmp(main_ds.xs.data().data(), main2.xs.data().data(),
                    main_ds.xs.data().size() * sizeof(double)) == 0);

  // Rows must not overlap between the two sides.
  std::set<std::vector<double>> main_rows;
  for (int i = 0; i < main_ds.size(); ++i) {
    main_rows.insert(std::vector<double>(main_ds.xs.row_ptr(i),
                                         main_ds.xs.row_ptr(i) + main_ds.dim()));
  }
  for (int i = 0; i < sub_ds.size(); ++i) {
    std::vector<double> row(sub_ds.xs.row_ptr(i), sub_ds.xs.row_ptr(i) + sub_ds.dim());
    CHECK(main_rows.count(row) == 0);
  }
}

TEST_CASE("split_by_class two classes one per side") {
  LabeledDataset ds = synth_faces(2, 5, 16, 3, 5.0);
  SplitSpec spec;
  spec.classes_per_side = 1;
  auto [a, b] = split_by_class(ds, spec);
  CHECK(a.class_count == 1);
  CHECK(b.class_count == 1);
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);

  spec.classes_per_side = 2;
  CHECK_THROWS_AS(split_by_class(ds, spec), InvalidSpecError);
}

TEST_CASE("split_train_test reproduces the paper-shaped counts") {
  LabeledDataset ds = synth_faces(19, 64, 49, 11, 5.0);
  REQUIRE(ds.size() == 1216);
  auto [train_ds, test_ds] = split_train_test(ds, 0.75, 21);
  CHECK(train_ds.size() == 912);
  CHECK(test_ds.size() == 304);
  CHECK(train_ds.class_count == 19);
  CHECK(test_ds.class_count == 19);
}

TEST_CASE("split_train_test stratification and partition property") {
  LabeledDataset ds = synth_faces(3, 4, 9, 5, 5.0);
  auto [train_ds, test_ds] = split_train_test(ds, 0.5, 2);
  // 2/2 per class.
  std::vector<int> train_counts(3, 0), test_counts(3, 0);
  for (int label : train_ds.labels) train_counts[static_cast<std::size_t>(label)]++;
  for (int label : test_ds.labels) test_counts[static_cast<std::size_t>(label)]++;
  for (int c = 0; c < 3; ++c) {
    CHECK(train_counts[static_cast<std::size_t>(c)] == 2);
    CHECK(test_counts[static_cast<std::size_t>(c)] == 2);
  }

  // Union of rows equals the input as a multiset.
  std::multiset<std::vector<double>> all_rows, split_rows;
  for (int i = 0; i < ds.size(); ++i) {
    all_rows.insert(std::vector<double>(ds.xs.row_ptr(i), ds.xs.row_ptr(i) + ds.dim()));
  }
  for (int i = 0; i < train_ds.size(); ++i) {
    split_rows.insert(std::vector<double>(train_ds.xs.row_ptr(i),
                                          train_ds.xs.row_ptr(i) + ds.dim()));
  }
  for (int i = 0; i < test_ds.size(); ++i) {
    split_rows.insert(std::vector<double>(test_ds.xs.row_ptr(i),
                                          test_ds.xs.row_ptr(i) + ds.dim()));
  }
  CHECK(all_rows == split_rows);

  LabeledDataset tiny = synth_faces(2, 1, 9, 5, 5.0);
  CHECK_THROWS_AS(split_train_test(tiny, 0.5, 1), InvalidSpecError);
}

TEST_CASE("synth_faces determinism and zero-noise limit") {
  LabeledDataset a = synth_faces(4, 6, 64, 123, 4.0);
  LabeledDataset b = synth_faces(4, 6, 64, 123, 4.0);
  CHECK(std::memcmp(a.xs.data().data(), b.xs.data().data(),
                    a.xs.data().size() * sizeof(double)) == 0);
  a.validate();

  LabeledDataset pure = synth_faces(3, 4, 49, 9,
                                    std::numeric_limits<double>::infinity());
  for (int c = 0; c < 3; ++c) {
    const double* first = pure.xs.row_ptr(c * 4);
    for (int s = 1; s < 4; ++s) {
      CHECK(std::memcmp(first, pure.xs.row_ptr(c * 4 + s),
                        static_cast<std::size_t>(pure.dim()) * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("high-snr synthetic data is learnable") {
  LabeledDataset ds = synth_faces(5, 40, 64, 77, 8.0);
  auto [train_ds, test_ds] = split_train_test(ds, 0.75, 3);
  Classifier theta = train(ClassifierKind::LogisticRegression, train_ds.xs,
                           train_ds.labels);
  CHECK(accuracy(theta, test_ds.xs, test_ds.labels) >= 0.95);
}

TEST_CASE("subsample_rows caps and preserves order") {
  LabeledDataset ds = synth_faces(4, 10, 16, 3, 5.0);
  LabeledDataset capped = subsample_rows(ds, 15, 8);
  CHECK(capped.size() == 15);
  CHECK(capped.dim() == ds.dim());
  // Labels stay sorted by original row order (class blocks ascending).
  for (std::size_t i = 1; i < capped.labels.size(); ++i) {
    CHECK(capped.labels[i] >= capped.labels[i - 1]);
  }
  LabeledDataset untouched = subsample_rows(ds, 1000, 8);
  CHECK(untouched.size() == ds.size());
}

TEST_CASE("dataset cache round-trips bit-exactly") {
  TempDir tmp("cache");
  LabeledDataset ds = synth_faces(3, 5, 25, 42, 6.0);
  // float32 cache: write from float-rounded source to compare exactly.
  for (double& v : ds.xs.data()) v = static_cast<float>(v);
  save_dataset_cache(tmp.path / "ds.drds", ds);
  LabeledDataset back = load_dataset_cache(tmp.path / "ds.drds");
  CHECK(back.size() == ds.size());
  CHECK(back.dim() == ds.dim());
  CHECK(back.class_count == ds.class_count);
  CHECK(back.labels == ds.labels);
  CHECK(std::memcmp(back.xs.data().data(), ds.xs.data().data(),
                    ds.xs.data().size() * sizeof(double)) == 0);
}

TEST_CASE("projection and reconstruction containers round-trip") {
  TempDir tmp("cont");

  ProjectionMatrix pm = build_random_sampling(20, 6, 5);
  save_projection(tmp.path / "p.drmx", pm);
  ProjectionMatrix pback = load_projection(tmp.path / "p.drmx");
  CHECK(pback.spec.method == Method::RandomSampling);
  CHECK(pback.spec.d == 20);
  CHECK(pback.spec.k == 6);
  CHECK(pback.spec.seed == 5);
  REQUIRE(pback.sampling.has_value());
  CHECK(pback.sampling->phi == pm.sampling->phi);
  CHECK(std::memcmp(pback.p.data().data(), pm.p.data().data(),
                    pm.p.data().size() * sizeof(double)) == 0);

  Xoshiro256 rng(4);
  Matrix data(30, 8);
  for (double& v : data.data()) v = rng.next_double();
  ProjectionMatrix pca = fit_pca(data, 3, true);
  save_projection(tmp.path / "pca.drmx", pca);
  ProjectionMatrix pca_back = load_projection(tmp.path / "pca.drmx");
  REQUIRE(pca_back.mean.has_value());
  CHECK(max_abs_diff(*pca_back.mean, *pca.mean) == 0.0);

  ReconstructionMatrix rm = attack_regression(pca, data);
  save_reconstruction(tmp.path / "q.drmx", rm);
  ReconstructionMatrix rback = load_reconstruction(tmp.path / "q.drmx");
  CHECK(rback.kind == AttackKind::Regression);
  CHECK(std::memcmp(rback.q.data().data(), rm.q.data().data(),
                    rm.q.data().size() * sizeof(double)) == 0);
  REQUIRE(rback.mean.has_value());

  CHECK_THROWS_AS(load_projection(tmp.path / "q.drmx"), IoError);
  CHECK_THROWS_AS(load_matrix(tmp.path / "p.drmx"), IoError);
}

TEST_CASE("flattening round-trips with the image grid") {
  TempDir tmp("flat");
  const int side = 6;
  GrayImage img;
  img.width = side;
  img.height = side;
  img.pixels.resize(36);
  Xoshiro256 rng(10);
  for (double& v : img.pixels) v = rng.next_double();
  write_pgm(tmp.path / "x.pgm", img);

  fs::create_directories(tmp.path / "cls");
  fs::copy(tmp.path / "x.pgm", tmp.path / "cls" / "x.pgm");
  TempDir tree("flat_tree");
  fs::create_directories(tree.path / "a");
  fs::create_directories(tree.path / "b");
  fs::copy(tmp.path / "x.pgm", tree.path / "a" / "x.pgm");
  fs::copy(tmp.path / "x.pgm", tree.path / "b" / "x.pgm");
  LabeledDataset ds = load_image_dir(tree.path, side);

  GrayImage quantized = read_pnm(tmp.path / "x.pgm");
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      CHECK(ds.xs(0, y * side + x) == quantized.at(y, x));
}

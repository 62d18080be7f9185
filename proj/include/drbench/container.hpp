#pragma once

#include <filesystem>

#include "drbench/attack.hpp"
#include "drbench/dataset.hpp"
#include "drbench/matrix.hpp"
#include "drbench/reduction.hpp"

namespace drbench {

// Flat binary container, little-endian, bit-exact across platforms.
//
// Matrix container ("DRMX", version 1):
//   magic[4] version:u32 kind:u8 payload
//   kind 0 raw matrix:     rows:u64 cols:u64 data:f64[rows*cols]
//   kind 1 projection:     method:u8 d:u64 k:u64 seed:u64 center:u8
//                          has_phi:u8 [phi:u64[k]] matrix-block
//                          has_mean:u8 [mean:f64[d]]
//   kind 2 reconstruction: rkind:u8 id_len:u32 id:bytes
//                          has_intercept:u8 has_mean:u8 matrix-block
//                          [intercept:f64[d]] [mean:f64[d]]
//
// Dataset cache ("DRDS", version 1):
//   magic[4] version:u32 n:u64 d:u64 class_count:u32
//   data:f32[n*d] labels:i32[n]

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

void save_projection(const std::filesystem::path& path, const ProjectionMatrix& pm);
ProjectionMatrix load_projection(const std::filesystem::path& path);

void save_reconstruction(const std::filesystem::path& path,
                         const ReconstructionMatrix& rm);
ReconstructionMatrix load_reconstruction(const std::filesystem::path& path);

void save_dataset_cache(const std::filesystem::path& path, const LabeledDataset& ds);
LabeledDataset load_dataset_cache(const std::filesystem::path& path);

}  // namespace drbench

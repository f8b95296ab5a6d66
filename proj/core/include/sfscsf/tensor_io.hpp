#pragma once

// SFST tensor files and SFCB codebook files, both little-endian.
//
// SFST:  magic "SFST" | version u16 = 1 | dtype u16 (0 real, 1 code)
//        | wbit u16 (code tensors only) | ndim u16 | dims ndim x u32
//        | payload row-major (real: 8-byte IEEE-754, code: u32 per element)
// SFCB:  magic "SFCB" | wbit u16 | 2^wbit x 8-byte IEEE-754 values

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sfscsf/tensor.hpp"

namespace sfs {

std::vector<std::uint8_t> save_tensor(const Tensor& t);
Tensor load_tensor(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> save_codebook(const QuantCodebook& codebook);
QuantCodebook load_codebook(const std::vector<std::uint8_t>& bytes);

// Path-based convenience wrappers. Throw FormatError on unreadable files.
Tensor load_tensor_file(const std::filesystem::path& path);
void save_tensor_file(const Tensor& t, const std::filesystem::path& path);
QuantCodebook load_codebook_file(const std::filesystem::path& path);
void save_codebook_file(const QuantCodebook& codebook, const std::filesystem::path& path);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

} // namespace sfs

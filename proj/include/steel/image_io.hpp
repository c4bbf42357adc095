#pragma once

#include <filesystem>

#include "steel/imaging.hpp"

namespace steel {

/// Reads an 8-bit PGM (P2 or P5, maxval <= 255) or PNG. Colour PNGs are reduced to the
/// unweighted mean of their colour channels; alpha is ignored.
GrayImage load_image(const std::filesystem::path& path);

/// Writes P5 PGM for `.pgm`, 8-bit grayscale PNG for `.png`.
void save_image(const std::filesystem::path& path, const GrayImage& image);

/// Masks travel as grayscale images with 0 / 255. Any nonzero pixel reads back as true.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const BinaryMask& mask);

GrayImage mask_to_image(const BinaryMask& mask);

/// Writes ASCII P2 instead of binary P5.
void save_pgm_ascii(const std::filesystem::path& path, const GrayImage& image);

}  // namespace steel

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vidiff/smoothing.hpp"
#include "vidiff/tensor.hpp"

namespace vidiff {

enum class FrameFormat { pgm, png };

FrameFormat frame_format_from_string(const std::string& s);
std::string to_string(FrameFormat format);

/// Channel-averages and min-max normalizes a frame to 8-bit gray. A frame
/// with zero range maps to mid-gray 128.
std::vector<uint8_t> quantize_frame(const Tensor& frame);

/// Writes frames as frame_000.<ext>, frame_001.<ext>, ... into `directory`
/// (created if missing) and returns the file paths. PGM is binary P5 with
/// maxval 255; PNG is 8-bit grayscale.
std::vector<std::string> write_frames(const FrameSequence& frames, const std::string& directory,
                                      FrameFormat format);

void write_pgm(const std::string& path, int h, int w, const std::vector<uint8_t>& gray);
void write_png_gray(const std::string& path, int h, int w, const std::vector<uint8_t>& gray);

struct GrayImage {
    int h = 0;
    int w = 0;
    std::vector<uint8_t> pixels;
};

/// Reads a binary (P5) PGM with maxval <= 255.
GrayImage read_pgm(const std::string& path);

/// Loads a frame directory written by write_frames back into tensors with
/// pixel values scaled to [0, 1] (single channel).
FrameSequence read_frame_directory(const std::string& directory);

/// Loads mask_000.pgm .. mask_{m-1}.pgm; pixels >= 128 are foreground.
/// Dimensions must equal the latent spatial dims.
std::vector<ForegroundMask> read_mask_directory(const std::string& directory, int m, int h,
                                                int w);

}  // namespace vidiff

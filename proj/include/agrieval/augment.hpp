#pragma once

// Seeded pixel-noise augmentation. Each operation is a pure function of
// (pixels, parameter, seed); per pixel-channel values are rounded to nearest
// and then clipped to [0,255].

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <variant>

#include "agrieval/core.hpp"
#include "agrieval/dataset.hpp"

namespace agrieval {

struct GaussianNoise {
  double sigma = 51.0;  // 0.2 * 255
};
struct SpeckleNoise {
  int severity = 2;
};
struct PoissonNoise {
  double peak = 40.0;
};
struct SaltPepperNoise {
  double amount = 0.1;
};

using NoiseKind =
    std::variant<GaussianNoise, SpeckleNoise, PoissonNoise, SaltPepperNoise>;

struct NoiseSpec {
  NoiseKind kind;
  std::uint64_t seed = 0;
};

// Multiplicative std per speckle severity level 1..5.
inline constexpr std::array<double, 5> kSpeckleSigma = {0.15, 0.20, 0.35, 0.45,
                                                        0.60};
inline constexpr std::string_view kRngName = "mt19937_64";

std::string_view noise_name(const NoiseKind& kind);
std::string_view noise_parameter_name(const NoiseKind& kind);
double noise_parameter(const NoiseKind& kind);

// Builds a spec from a noise name and optional scalar; the default scalar is
// the standard setting for that noise. Throws InvalidParameter.
NoiseSpec make_noise_spec(std::string_view name, std::optional<double> parameter,
                          std::uint64_t seed = 0);
void validate(const NoiseSpec& spec);

ImageBuffer gaussian_noise(const ImageBuffer& image, double sigma,
                           std::uint64_t seed);
ImageBuffer speckle_noise(const ImageBuffer& image, int severity,
                          std::uint64_t seed);
ImageBuffer poisson_noise(const ImageBuffer& image, double peak,
                          std::uint64_t seed);
ImageBuffer salt_pepper_noise(const ImageBuffer& image, double amount,
                              std::uint64_t seed);
ImageBuffer apply_noise(const ImageBuffer& image, const NoiseSpec& spec);

// Stable 64-bit derivation of a per-image seed.
std::uint64_t image_seed(std::uint64_t seed, std::string_view image_id);

/// Writes one noised PNG per entry into `out_dir` (named after the sanitised
/// image id) and returns a manifest pointing at them. Annotations are carried
/// over untouched. `threads` = 0 picks the hardware concurrency.
DatasetManifest augment_dataset(const DatasetManifest& manifest,
                                const NoiseSpec& spec,
                                const std::filesystem::path& out_dir,
                                unsigned threads = 0);

}  // namespace agrieval

#include "agrieval/augment.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>

#include "agrieval/image_io.hpp"
#include "parallel.hpp"

namespace agrieval {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::uint8_t clip_round(double value) {
  const double r = std::round(value);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameter("gaussian sigma must be a finite value >= 0, got " +
                           std::to_string(sigma));
  }
}

void check_severity(int severity) {
  if (severity < 1 || severity > static_cast<int>(kSpeckleSigma.size())) {
    throw InvalidParameter("speckle severity must be in 1..5, got " +
                           std::to_string(severity));
  }
}

void check_peak(double peak) {
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw InvalidParameter("poisson peak must be > 0, got " +
                           std::to_string(peak));
  }
}

void check_amount(double amount) {
  if (!(amount >= 0.0 && amount <= 1.0)) {
    throw InvalidParameter("salt-and-pepper amount must be in [0,1], got " +
                           std::to_string(amount));
  }
}

}  // namespace

std::string_view noise_name(const NoiseKind& kind) {
  return std::visit(overloaded{
                        [](const GaussianNoise&) { return "gaussian"; },
                        [](const SpeckleNoise&) { return "speckle"; },
                        [](const PoissonNoise&) { return "poisson"; },
                        [](const SaltPepperNoise&) { return "saltpepper"; },
                    },
                    kind);
}

std::string_view noise_parameter_name(const NoiseKind& kind) {
  return std::visit(overloaded{
                        [](const GaussianNoise&) { return "sigma"; },
                        [](const SpeckleNoise&) { return "severity"; },
                        [](const PoissonNoise&) { return "peak"; },
                        [](const SaltPepperNoise&) { return "amount"; },
                    },
                    kind);
}

double noise_parameter(const NoiseKind& kind) {
  return std::visit(
      overloaded{
          [](const GaussianNoise& n) { return n.sigma; },
          [](const SpeckleNoise& n) { return static_cast<double>(n.severity); },
          [](const PoissonNoise& n) { return n.peak; },
          [](const SaltPepperNoise& n) { return n.amount; },
      },
      kind);
}

NoiseSpec make_noise_spec(std::string_view name, std::optional<double> parameter,
                          std::uint64_t seed) {
  NoiseSpec spec{GaussianNoise{}, seed};
  if (name == "gaussian") {
    spec.kind = GaussianNoise{parameter.value_or(GaussianNoise{}.sigma)};
  } else if (name == "speckle") {
    const double p = parameter.value_or(SpeckleNoise{}.severity);
    if (p != std::floor(p) || !std::isfinite(p) || p < -1e9 || p > 1e9) {
      throw InvalidParameter("speckle severity must be an integer, got " +
                             std::to_string(p));
    }
    spec.kind = SpeckleNoise{static_cast<int>(p)};
  } else if (name == "poisson") {
    spec.kind = PoissonNoise{parameter.value_or(PoissonNoise{}.peak)};
  } else if (name == "saltpepper") {
    spec.kind = SaltPepperNoise{parameter.value_or(SaltPepperNoise{}.amount)};
  } else {
    throw InvalidParameter("unknown noise kind '" + std::string(name) +
                           "' (expected gaussian, speckle, poisson, saltpepper)");
  }
  validate(spec);
  return spec;
}

void validate(const NoiseSpec& spec) {
  std::visit(overloaded{
                 [](const GaussianNoise& n) { check_sigma(n.sigma); },
                 [](const SpeckleNoise& n) { check_severity(n.severity); },
                 [](const PoissonNoise& n) { check_peak(n.peak); },
                 [](const SaltPepperNoise& n) { check_amount(n.amount); },
             },
             spec.kind);
}

ImageBuffer gaussian_noise(const ImageBuffer& image, double sigma,
                           std::uint64_t seed) {
  check_sigma(sigma);
  ImageBuffer out = image;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : out.mutable_data()) {
    v = clip_round(v + sigma * normal(rng));
  }
  return out;
}

ImageBuffer speckle_noise(const ImageBuffer& image, int severity,
                          std::uint64_t seed) {
  check_severity(severity);
  const double sigma = kSpeckleSigma[severity - 1];
  ImageBuffer out = image;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : out.mutable_data()) {
    const double x = v;
    v = clip_round(x + x * sigma * normal(rng));
  }
  return out;
}

ImageBuffer poisson_noise(const ImageBuffer& image, double peak,
                          std::uint64_t seed) {
  check_peak(peak);
  // One distribution per intensity level; level 0 has rate 0 and stays 0.
  std::vector<std::poisson_distribution<long long>> dists;
  dists.reserve(255);
  for (int level = 1; level <= 255; ++level) {
    dists.emplace_back(level / 255.0 * peak);
  }
  const double scale = 255.0 / peak;
  ImageBuffer out = image;
  std::mt19937_64 rng(seed);
  for (auto& v : out.mutable_data()) {
    if (v == 0) continue;
    const auto count = dists[v - 1](rng);
    v = clip_round(static_cast<double>(count) * scale);
  }
  return out;
}

ImageBuffer salt_pepper_noise(const ImageBuffer& image, double amount,
                              std::uint64_t seed) {
  check_amount(amount);
  ImageBuffer out = image;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::bernoulli_distribution salt(0.5);
  auto data = out.mutable_data();
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    if (!(uniform(rng) < amount)) continue;
    const std::uint8_t value = salt(rng) ? 255 : 0;
    for (std::size_t c = 0; c < ImageBuffer::kChannels; ++c) {
      data[p * ImageBuffer::kChannels + c] = value;
    }
  }
  return out;
}

ImageBuffer apply_noise(const ImageBuffer& image, const NoiseSpec& spec) {
  return std::visit(
      overloaded{
          [&](const GaussianNoise& n) {
            return gaussian_noise(image, n.sigma, spec.seed);
          },
          [&](const SpeckleNoise& n) {
            return speckle_noise(image, n.severity, spec.seed);
          },
          [&](const PoissonNoise& n) {
            return poisson_noise(image, n.peak, spec.seed);
          },
          [&](const SaltPepperNoise& n) {
            return salt_pepper_noise(image, n.amount, spec.seed);
          },
      },
      spec.kind);
}

std::uint64_t image_seed(std::uint64_t seed, std::string_view image_id) {
  // FNV-1a over the id, then mixed with the global seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : image_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed) ^ h);
}

DatasetManifest augment_dataset(const DatasetManifest& manifest,
                                const NoiseSpec& spec,
                                const std::filesystem::path& out_dir,
                                unsigned threads) {
  validate(spec);
  validate_manifest(manifest);

  DatasetManifest result;
  result.base_dir = out_dir;
  if (manifest.entries.empty()) return result;

  std::set<std::string> names;
  std::vector<std::string> file_names;
  file_names.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    std::string name = safe_file_stem(entry.image_id) + ".png";
    if (!names.insert(name).second) {
      throw ValidationError("image ids map to the same output file '" + name +
                            "'");
    }
    file_names.push_back(std::move(name));
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + out_dir.string() + ": " +
                  ec.message());
  }

  result.entries.resize(manifest.entries.size());
  detail::parallel_for(manifest.entries.size(), threads, [&](std::size_t i) {
    const ManifestEntry& src = manifest.entries[i];
    const ImageBuffer image = read_png(manifest.image_path(src));
    if (image.width() != src.width || image.height() != src.height) {
      throw ValidationError("image " + manifest.image_path(src).string() +
                            " is " + std::to_string(image.width()) + "x" +
                            std::to_string(image.height()) +
                            " but the manifest declares " +
                            std::to_string(src.width) + "x" +
                            std::to_string(src.height));
    }
    NoiseSpec per_image = spec;
    per_image.seed = image_seed(spec.seed, src.image_id);
    write_png(apply_noise(image, per_image), out_dir / file_names[i]);

    ManifestEntry entry = src;
    entry.file_path = file_names[i];
    entry.provenance = Provenance{
        .source_image_id = src.image_id,
        .kind = std::string(noise_name(spec.kind)),
        .parameter_name = std::string(noise_parameter_name(spec.kind)),
        .parameter = noise_parameter(spec.kind),
        .seed = spec.seed,
        .image_seed = per_image.seed,
        .rng = std::string(kRngName),
    };
    result.entries[i] = std::move(entry);
  });
  return result;
}

}  // namespace agrieval

#pragma once

#include <cstdint>
#include <random>

namespace invdiv {

// Deterministic random stream identified by (seed, stream_id). The engine is
// std::mt19937_64 seeded through std::seed_seq, both fully specified by the
// standard, and every variate below is generated by code in this library
// rather than by the implementation-defined <random> distributions, so
// sequences are bit-identical across platforms. Distinct stream ids give
// independent streams; parallel work assigns one stream per task.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();
  // Gamma(shape, scale 1), Marsaglia-Tsang.
  double gamma(double shape);
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }
  bool bernoulli(double p) { return uniform() < p; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace invdiv

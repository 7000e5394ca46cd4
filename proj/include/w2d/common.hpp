#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace w2d {

// Universal point type. Components at indices >= dim are kept at zero so the
// same code paths serve n = 2 and n = 3 without heap-allocating vectors.
using Vec3 = Eigen::Vector3d;

struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Portable deterministic RNG (splitmix64). Used wherever sampled output ends
// up in data files, so replays are byte-identical across runs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [a, b)
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

 private:
  std::uint64_t state_;
};

// Halton low-discrepancy sequence, one shared definition for quasi-random
// domain sampling.
inline double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= double(base);
    r += f * double(index % base);
    index /= base;
  }
  return r;
}

inline constexpr const char* kVersion = "0.1.0";

// Worker-thread count for node-parallel loops. Results are written to
// preallocated slots, so the outcome is identical for any thread count.
void set_worker_threads(int k);
int worker_threads();

// parallel_for over [0, n) with deterministic output: f(i) must only touch
// slot i of preallocated storage.
void parallel_for(long n, const std::function<void(long)>& f);

}  // namespace w2d

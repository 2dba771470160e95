#pragma once

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace saccade {

// Thrown on bad arguments / precondition violations (CLI exit 1).
struct value_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on malformed or inconsistent data files (CLI exit 2).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a computation produces NaN/Inf (CLI exit 3).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check(bool ok, const std::string& msg) {
  if (!ok) throw value_error(msg);
}

// Planar channel-major image storage: data[c*h*w + y*w + x].
template <typename T>
struct Grid3 {
  int channels = 0, height = 0, width = 0;
  std::vector<T> data;

  Grid3() = default;
  Grid3(int c, int h, int w, T fill = T(0))
      : channels(c), height(h), width(w), data(size_t(c) * h * w, fill) {}

  T& at(int c, int y, int x) { return data[(size_t(c) * height + y) * width + x]; }
  const T& at(int c, int y, int x) const {
    return data[(size_t(c) * height + y) * width + x];
  }
  T* plane(int c) { return data.data() + size_t(c) * height * width; }
  const T* plane(int c) const { return data.data() + size_t(c) * height * width; }
  size_t size() const { return data.size(); }
  bool same_shape(const Grid3& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
  bool operator==(const Grid3& o) const { return same_shape(o) && data == o.data; }
};

template <typename T>
struct Grid2 {
  int height = 0, width = 0;
  std::vector<T> data;

  Grid2() = default;
  Grid2(int h, int w, T fill = T(0)) : height(h), width(w), data(size_t(h) * w, fill) {}

  T& at(int y, int x) { return data[size_t(y) * width + x]; }
  const T& at(int y, int x) const { return data[size_t(y) * width + x]; }
  size_t size() const { return data.size(); }
  bool operator==(const Grid2& o) const {
    return height == o.height && width == o.width && data == o.data;
  }
};

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline uint64_t fnv1a(const void* bytes, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), h);
}

inline int thread_count() {
  if (const char* env = std::getenv("SACCADE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

// Runs fn(i) for i in [0, n). Work is split statically; results must be
// written to per-index slots so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn, int max_threads = -1) {
  int workers = max_threads > 0 ? max_threads : thread_count();
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr err;
  std::mutex err_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace saccade

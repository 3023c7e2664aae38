// Timing comparison of the OpenMP kernels against the serial reference
// implementations. BIYM_THREADS caps the team size.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "biym/flow.hpp"
#include "biym/functional.hpp"
#include "biym/reference.hpp"
#include "biym/threading.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_loop(const std::function<void()>& fn, int min_reps = 3,
                 double min_seconds = 0.2) {
  // one warmup, then repeat until the budget is spent
  fn();
  int reps = 0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  while (reps < min_reps || elapsed < min_seconds) {
    fn();
    ++reps;
    elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  }
  return elapsed / reps * 1e3;  // ms per call
}

}  // namespace

int main() {
  biym::init_threads_from_env();
  using namespace biym;

  const auto lat = Lattice::make(4, {8, 8, 8, 8}, 1.0);
  const int m = 3;
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const DensityF F = DensityF::born_infeld();
  const Connection D = random_connection(lat, m, 42, 0.8);
  const PForm B = random_form(lat, 1, m, 43, 0.8);
  const PForm R = curvature(D);

  std::printf("lattice 8^4, n=4, m=%d, %lld sites, %d thread(s)\n\n", m,
              static_cast<long long>(lat->num_sites()), num_threads());
  std::printf("%-18s %12s %12s %9s %12s\n", "kernel", "serial ms",
              "parallel ms", "speedup", "max |diff|");

  struct Row {
    std::string name;
    std::function<PForm()> serial;
    std::function<PForm()> parallel;
  };
  const Row rows[] = {
      {"curvature", [&] { return ref::curvature(D); },
       [&] { return curvature(D); }},
      {"d (1-form)", [&] { return ref::d(D, B); }, [&] { return d(D, B); }},
      {"d (2-form)", [&] { return ref::d(D, R); }, [&] { return d(D, R); }},
      {"delta (2-form)", [&] { return ref::delta(D, g, R); },
       [&] { return delta(D, g, R); }},
      {"wedge_bracket", [&] { return ref::wedge_bracket(B, B); },
       [&] { return wedge_bracket(B, B); }},
  };

  for (const auto& row : rows) {
    PForm a = row.serial();
    PForm b = row.parallel();
    a.axpy(-1.0, b);
    const double diff = a.max_abs();
    const double ts = time_loop([&] { row.serial(); });
    const double tp = time_loop([&] { row.parallel(); });
    std::printf("%-18s %12.3f %12.3f %8.2fx %12.3e\n", row.name.c_str(), ts,
                tp, ts / tp, diff);
  }

  {
    const double ts = time_loop([&] { ref::inner_form(R, R, g); });
    const double tp = time_loop([&] { inner_form(R, R, g); });
    const double diff =
        std::abs(ref::inner_form(R, R, g) - inner_form(R, R, g));
    std::printf("%-18s %12.3f %12.3f %8.2fx %12.3e\n", "inner_form", ts, tp,
                ts / tp, diff);
  }
  {
    const double ts = time_loop([&] { ref::stress_energy(D, g, F); });
    const double tp = time_loop([&] { stress_energy(D, g, F); });
    const StressTensor sa = ref::stress_energy(D, g, F);
    const StressTensor sb = stress_energy(D, g, F);
    double diff = 0.0;
    for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
      for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
          diff = std::max(diff, std::abs(sa.at(x, k, l) - sb.at(x, k, l)));
        }
      }
    }
    std::printf("%-18s %12.3f %12.3f %8.2fx %12.3e\n", "stress_energy", ts,
                tp, ts / tp, diff);
  }
  return 0;
}

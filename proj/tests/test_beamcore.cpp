#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pabf/beamcore.hpp"
#include "pabf/errors.hpp"
#include "support.hpp"

using namespace pabf;
using testsupport::frame_of;
using testsupport::random_frame;
using testsupport::random_table;
using testsupport::rel_diff;
using testsupport::shifted_table;

namespace {

BeamformedImage scaled(const RFFrame& f, const DelayTable& t, Method m, int p, double c) {
  RFFrame g = f;
  for (double& v : g.samples) v *= c;
  return beamform(g, t, BeamformerSpec::make(m, p));
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_SUITE("beamcore") {

TEST_CASE("signed root") {
  CHECK(signed_root(0.0, 1) == 0.0);
  CHECK(signed_root(0.0, 4) == 0.0);
  CHECK(signed_root(0.0, 7) == 0.0);
  CHECK(signed_root(-8.0, 3) == -2.0);
  CHECK(signed_root(0.25, 2) == 0.5);
  CHECK(signed_root(-0.25, 2) == -0.5);
  CHECK(signed_root(-3.5, 1) == -3.5);
  CHECK(signed_root(81.0, 4) == doctest::Approx(3.0));
  CHECK(signed_root(-32.0, 5) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(signed_root(1.0, 0), ParameterError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 200; ++k) {
    const double x = u(rng);
    for (int p = 1; p <= 9; ++p) {
      REQUIRE(signed_root(-x, p) == -signed_root(x, p));
      REQUIRE(std::pow(std::abs(signed_root(x, p)), p) == doctest::Approx(std::abs(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("integer power") {
  CHECK(int_pow(2.0, 0) == 1.0);
  CHECK(int_pow(-2.0, 3) == -8.0);
  CHECK(int_pow(-2.0, 4) == 16.0);
  CHECK(int_pow(1.5, 10) == doctest::Approx(std::pow(1.5, 10)));
  CHECK(int_pow(0.9, 40) == doctest::Approx(std::pow(0.9, 40)));
}

TEST_CASE("shift-and-sum example") {
  const RFFrame f = frame_of({{1, 2, 3}, {4, 5, 6}});
  const std::int64_t shifts[] = {0, 1};
  const auto y = beamform_trace(f, shifts, BeamformerSpec::make(Method::DAS));
  CHECK(y == std::vector<double>{1, 6, 8});
}

TEST_CASE("pair and root examples") {
  CHECK(dmas_kernel(std::vector<double>{4, 9}) == 6.0);
  CHECK(dmas_kernel(std::vector<double>{1, -1, 4}) == -1.0);
  CHECK(nl_kernel(std::vector<double>{4, 9}, 2) == 6.25);
  CHECK(nl_kernel(std::vector<double>{-8, 27}, 3) == 0.125);
  CHECK(nl2_decomposition_kernel(std::vector<double>{4, 9}) == 6.25);
  CHECK(das_kernel(std::vector<double>{1, -2, 4}) == 3.0);

  const double a = 0.7;
  for (std::size_t m : {2u, 5u, 16u}) {
    std::vector<double> eq(m, a);
    CHECK(dmas_kernel(eq) == doctest::Approx(m * (m - 1) / 2.0 * a));
  }
}

TEST_CASE("image-level examples") {
  SUBCASE("single channel DAS resamples the channel") {
    const RFFrame f = frame_of({{5, 6, 7, 8}});
    const BeamformedImage img = das(f, shifted_table(4, {1}));
    CHECK(img.values == std::vector<double>{6, 7, 8, 0});
  }
  SUBCASE("identical channels, zero delays") {
    const RFFrame f = frame_of({{1, -2, 3}, {1, -2, 3}, {1, -2, 3}, {1, -2, 3}});
    CHECK(das(f, shifted_table(3, {0, 0, 0, 0})).values == std::vector<double>{4, -8, 12});
  }
  SUBCASE("pair values through the image path") {
    const RFFrame f = frame_of({{4}, {9}});
    const DelayTable t = shifted_table(1, {0, 0});
    CHECK(dmas(f, t).values[0] == 6.0);
    CHECK(nl_p(f, t, 2).values[0] == 6.25);
    CHECK(nl2_decomposition(f, t).values[0] == 6.25);
    const RFFrame g = frame_of({{-8}, {27}});
    CHECK(nl_p(g, t, 3).values[0] == doctest::Approx(0.125).epsilon(1e-15));
  }
  SUBCASE("three-channel DMAS") {
    const RFFrame f = frame_of({{1}, {-1}, {4}});
    CHECK(dmas(f, shifted_table(1, {0, 0, 0})).values[0] == -1.0);
  }
  SUBCASE("all-zero frame") {
    const RFFrame f = frame_of({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    for (double v : nl2_decomposition(f, shifted_table(3, {0, 1, 2})).values) CHECK(v == 0.0);
  }
}

TEST_CASE("NL with p = 1 is DAS over M") {
  std::mt19937_64 rng(11);
  for (std::size_t m : {1u, 3u, 16u}) {
    const RFFrame f = random_frame(m, 50, rng);
    const DelayTable t = random_table(40, m, 55, rng);
    const auto d = das(f, t).values;
    const auto n = nl_p(f, t, 1).values;
    for (std::size_t k = 0; k < d.size(); ++k) REQUIRE(n[k] == d[k] / static_cast<double>(m));
  }
}

TEST_CASE("errors") {
  const RFFrame one = frame_of({{1, 2, 3}});
  CHECK_THROWS_AS(dmas(one, shifted_table(3, {0})), ParameterError);
  CHECK_THROWS_AS(nl2_decomposition(one, shifted_table(3, {0})), ParameterError);
  const RFFrame two = frame_of({{1, 2}, {3, 4}});
  CHECK_THROWS_AS(nl_p(two, shifted_table(2, {0, 0}), 0), ParameterError);
  CHECK_THROWS_AS(das(two, shifted_table(2, {0, 0, 0})), ParameterError);
  const std::int64_t shifts[] = {0};
  CHECK_THROWS_AS(beamform_trace(two, shifts, BeamformerSpec::make(Method::DAS)), ParameterError);
  CHECK_THROWS_AS(parse_method("mvdr"), ParameterError);
}

TEST_CASE("decomposition identity on random frames") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = std::size_t{2} << (trial % 4);
    const RFFrame f = random_frame(m, 64, rng);
    const DelayTable t = random_table(64, m, 70, rng);
    const auto a = nl_p(f, t, 2).values;
    const auto b = nl2_decomposition(f, t).values;
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(rel_diff(a[k], b[k]) <= 1e-9);
  }
}

TEST_CASE("DAS linearity") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(-50, 50);
  const std::size_t m = 8, ns = 40;
  RFFrame f = random_frame(m, ns, rng), g = random_frame(m, ns, rng), h = f;
  // integer-valued samples keep every sum exact
  for (std::size_t k = 0; k < f.samples.size(); ++k) {
    f.samples[k] = u(rng);
    g.samples[k] = u(rng);
    h.samples[k] = 3.0 * f.samples[k] - 2.0 * g.samples[k];
  }
  const DelayTable t = random_table(30, m, 45, rng);
  const auto df = das(f, t).values, dg = das(g, t).values, dh = das(h, t).values;
  for (std::size_t k = 0; k < dh.size(); ++k) REQUIRE(dh[k] == 3.0 * df[k] - 2.0 * dg[k]);

  const RFFrame r1 = random_frame(m, ns, rng), r2 = random_frame(m, ns, rng);
  RFFrame r3 = r1;
  for (std::size_t k = 0; k < r3.samples.size(); ++k) r3.samples[k] = 0.3 * r1.samples[k] + 1.7 * r2.samples[k];
  const auto a = das(r1, t).values, b = das(r2, t).values, c = das(r3, t).values;
  for (std::size_t k = 0; k < c.size(); ++k) REQUIRE(c[k] == doctest::Approx(0.3 * a[k] + 1.7 * b[k]).epsilon(1e-12));
}

TEST_CASE("positive-scale homogeneity") {
  std::mt19937_64 rng(8);
  const RFFrame f = random_frame(6, 48, rng);
  const DelayTable t = random_table(40, 6, 50, rng);
  for (double c : {0.01, 2.5, 1000.0}) {
    for (auto [m, p] : {std::pair{Method::DAS, 1}, {Method::DMAS, 1}, {Method::NL, 2}, {Method::NL, 3}, {Method::NL, 6}}) {
      const auto base = beamform(f, t, BeamformerSpec::make(m, p)).values;
      const auto sc = scaled(f, t, m, p, c).values;
      const double tol = 1e-12 * max_abs(base) * c;
      for (std::size_t k = 0; k < base.size(); ++k) REQUIRE(std::abs(sc[k] - c * base[k]) <= tol);
    }
  }
}

TEST_CASE("sign symmetry and even-p non-negativity") {
  std::mt19937_64 rng(9);
  const RFFrame f = random_frame(7, 60, rng);
  RFFrame neg = f;
  for (double& v : neg.samples) v = -v;
  const DelayTable t = random_table(50, 7, 65, rng);
  for (int p = 1; p <= 8; ++p) {
    const auto a = nl_p(f, t, p).values;
    const auto b = nl_p(neg, t, p).values;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (p % 2 == 0) {
        REQUIRE(a[k] >= 0.0);
        REQUIRE(b[k] == a[k]);
      } else {
        REQUIRE(b[k] == -a[k]);
      }
    }
  }
}

TEST_CASE("channel permutation invariance") {
  std::mt19937_64 rng(10);
  const std::size_t m = 9, nz = 30;
  const RFFrame f = random_frame(m, 40, rng);
  const DelayTable t = random_table(nz, m, 45, rng);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  RFFrame pf = f;
  std::vector<std::int32_t> pd(nz * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < f.num_samples; ++k) pf.at(i, k) = f.at(perm[i], k);
    for (std::size_t px = 0; px < nz; ++px) pd[px * m + i] = t.at(px, perm[i]);
  }
  const DelayTable pt(t.grid(), m, pd);
  for (auto [meth, p] : {std::pair{Method::DAS, 1}, {Method::DMAS, 1}, {Method::NL, 3}, {Method::NL, 4}}) {
    const auto a = beamform(f, t, BeamformerSpec::make(meth, p)).values;
    const auto b = beamform(pf, pt, BeamformerSpec::make(meth, p)).values;
    const double tol = 1e-12 * max_abs(a);
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(std::abs(a[k] - b[k]) <= tol);
  }
}

TEST_CASE("threaded beamforming is bit-identical") {
  const ArrayGeometry g = ArrayGeometry::centered(24, 0.3e-3, 4e6, 0.77, 50e6, 1540);
  PhantomSpec p;
  p.targets = {{0.5e-3, 6e-3, 1.0}};
  p.noise_snr_db = 10.0;
  const RFFrame f = simulate_frame(g, p, 500).frame;
  const DelayTable t = compute_delays(g, build_grid(g, -2e-3, 2e-3, 5e-3, 7e-3, 17));
  for (auto [m, pp] : {std::pair{Method::DAS, 1}, {Method::DMAS, 1}, {Method::NL, 5}}) {
    const auto spec = BeamformerSpec::make(m, pp);
    CHECK(beamform(f, t, spec, {1}).values == beamform(f, t, spec, {3}).values);
  }
}

TEST_CASE("trace form agrees with the image form") {
  std::mt19937_64 rng(12);
  const RFFrame f = random_frame(5, 32, rng);
  const std::vector<std::int32_t> shift{0, 3, 1, 7, 2};
  std::vector<std::int64_t> neg(shift.begin(), shift.end());
  for (auto& s : neg) s = -s;
  for (auto [m, p] : {std::pair{Method::DAS, 1}, {Method::DMAS, 1}, {Method::NL, 3}}) {
    const auto spec = BeamformerSpec::make(m, p);
    CHECK(beamform_trace(f, neg, spec) == beamform(f, shifted_table(32, shift), spec).values);
  }
}

TEST_CASE("op counts and BeamformerSpec rules") {
  CHECK(ops_per_pixel(Method::DMAS, 128) == 8128);
  CHECK(ops_per_pixel(Method::DAS, 128) == 128);
  CHECK(ops_per_pixel(Method::NL, 128) == 128);
  CHECK(filter_required(Method::DMAS, 1));
  CHECK(filter_required(Method::NL, 2));
  CHECK_FALSE(filter_required(Method::NL, 3));
  CHECK_FALSE(filter_required(Method::DAS, 1));

  BeamformerSpec s = BeamformerSpec::make(Method::NL, 4);
  CHECK(s.apply_filter);
  CHECK(s.label() == "NL_4");
  s.apply_filter = false;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  BeamformerSpec d = BeamformerSpec::make(Method::DMAS);
  d.apply_filter = false;
  CHECK_THROWS_AS(d.validate(), ParameterError);
  BeamformerSpec das_on = BeamformerSpec::make(Method::DAS);
  das_on.apply_filter = true;
  CHECK_NOTHROW(das_on.validate());
  CHECK_THROWS_AS(BeamformerSpec::make(Method::NL, 0).validate(), ParameterError);
  CHECK(BeamformerSpec::make(Method::DMAS).label() == "DMAS");
  CHECK(parse_method("nl") == Method::NL);
  CHECK(to_string(Method::DMAS) == "dmas");
}

}

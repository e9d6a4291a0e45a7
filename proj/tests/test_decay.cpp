#include <cmath>
#include <limits>

#include "doctest.h"
#include "tlsctl/decay.hpp"
#include "tlsctl/units.hpp"

using namespace tlsctl;

namespace {

BathState single(const TlsDefect& d, double xi = 0.0) {
  BathState b;
  b.defects = {d};
  b.xi = {xi};
  return b;
}

TlsDefect resonant_tls(double detuning_ghz = 0.0) {
  // epsilon0 = 0 puts the defect at its symmetry point, so g_eff = g_bare.
  return TlsDefect::from_user_units(0.0, 4.5 - detuning_ghz, 0.0, 50.0, 1.0, 1.0, 100.0);
}

}  // namespace

TEST_SUITE("decay") {

TEST_CASE("triangle waveform") {
  const WaveformSpec w = TriangleWave{0.1, 16.0};
  CHECK(waveform_voltage(w, 0.0, 0.0) == 0.0);
  CHECK(waveform_voltage(w, 2.5, 0.0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(waveform_voltage(w, 5.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(waveform_voltage(w, 7.5, 0.0) == doctest::Approx(-8.0).epsilon(1e-12));
  CHECK(waveform_voltage(w, 1.25, 0.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(waveform_voltage(w, 0.0, 0.25) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(waveform_voltage(w, 12.5, 0.0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(waveform_voltage(ZeroWave{}, 3.0, 0.1) == 0.0);
  CHECK(waveform_voltage(DcWave{-2.5}, 3.0, 0.1) == -2.5);
  CHECK(std::get<TriangleWave>(w).slope_v_per_s() == doctest::Approx(3.2));
}

TEST_CASE("tls loss examples") {
  QubitSpec q;
  CHECK(gamma_tls(q, BathState{}, 0.0) == 0.0);
  const double on = gamma_tls(q, single(resonant_tls()), 0.0);
  CHECK(on == doctest::Approx(units::kPi * 0.01).epsilon(1e-12));
  CHECK(on == doctest::Approx(3.14e-2).epsilon(0.001));
  const double off = gamma_tls(q, single(resonant_tls(0.010)), 0.0);
  CHECK(off == doctest::Approx(units::kPi * 0.01 / 101.0).epsilon(1e-9));
  CHECK(off == doctest::Approx(3.1e-4).epsilon(0.01));
}

TEST_CASE("tls loss is additive, even and monotone in detuning") {
  QubitSpec q;
  const TlsDefect a = resonant_tls(0.002), b = resonant_tls(-0.004);
  BathState both;
  both.defects = {a, b};
  both.xi = {0.0, 0.0};
  CHECK(gamma_tls(q, both, 0.0) ==
        doctest::Approx(gamma_tls(q, single(a), 0.0) + gamma_tls(q, single(b), 0.0)).epsilon(1e-14));

  // Fixed coupling: vary delta0 around a symmetric defect so g_eff = g_bare throughout.
  double prev = std::numeric_limits<double>::infinity();
  for (double det = 0.0; det < 0.05; det += 0.001) {
    const double up = gamma_tls(q, single(resonant_tls(det)), 0.0);
    const double down = gamma_tls(q, single(resonant_tls(-det)), 0.0);
    CHECK(up == doctest::Approx(down).epsilon(1e-6));
    CHECK(up <= prev);
    CHECK(up >= 0.0);
    prev = up;
  }
}

TEST_CASE("MHz inputs and pre-converted rates agree") {
  QubitSpec q;
  const TlsDefect user = TlsDefect::from_user_units(0.3, 4.48, 0.01, 20.0, 0.7, 5.0, 100.0);
  TlsDefect raw = user;
  raw.g_bare = units::kTwoPi * 20.0e-3;
  raw.gamma2 = units::kTwoPi * 0.7;
  CHECK(gamma_tls(q, single(user), 1.5) == doctest::Approx(gamma_tls(q, single(raw), 1.5)).epsilon(1e-12));
}

TEST_CASE("fast evaluator matches the reference sum") {
  QubitSpec q;
  BathConfig c;
  c.n_tls = 300;
  const BathState b = sample_bath(c, 5);
  const TlsRateEvaluator eval(q, b);
  for (double v : {-8.0, -3.3, 0.0, 0.7, 8.0}) {
    CHECK(eval(v) == doctest::Approx(gamma_tls(q, b, v)).epsilon(1e-12));
  }
}

TEST_CASE("quasiparticle loss") {
  QubitSpec q;
  CHECK(gamma_qp(0.0, q) == 0.0);
  CHECK_THROWS_AS(gamma_qp(-1.0, q), std::invalid_argument);
  CHECK(gamma_qp(120.0, q) > gamma_qp(100.0, q));
  // Arbitrary-precision values from tests/oracles/gamma_qp_oracle.py.
  CHECK(gamma_qp(150.0, q) == doctest::Approx(0.024003499734096201912).epsilon(1e-12));
  CHECK(gamma_qp(100.0, q) == doctest::Approx(0.000018621557417146684949).epsilon(1e-12));
  CHECK(gamma_qp(200.0, q) == doctest::Approx(0.89918779546413362501).epsilon(1e-12));
  for (double t = 20.0; t < 300.0; t += 10.0) {
    CHECK(gamma_qp(t + 1.0, q) > gamma_qp(t, q));
    CHECK(gamma_qp(t, 4.5, 40.0) > gamma_qp(t, 4.5, 43.5));
  }
}

TEST_CASE("crossing probability") {
  CHECK(lz_crossing_probability(0.0, 1.0) == 0.0);
  const double g = 0.3;
  CHECK(lz_crossing_probability(g, 1.0e8 * units::kTwoPi * g * g) < 1e-6);
  CHECK(lz_crossing_probability(1.0, units::kTwoPi / std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(lz_crossing_probability(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lz_crossing_probability(0.1, -1.0), std::invalid_argument);
  double prev = -1.0;
  for (double gg = 0.0; gg < 2.0; gg += 0.05) {
    const double p = lz_crossing_probability(gg, 1.0);
    CHECK(p >= 0.0);
    CHECK(p < 1.0);
    CHECK(p >= prev);
    prev = p;
  }
  prev = 2.0;
  for (double v = 0.1; v < 100.0; v *= 1.5) {
    const double p = lz_crossing_probability(0.5, v);
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("landau-zener rate") {
  QubitSpec q;
  const BathState ref = sample_bath(BathConfig{}, 1);
  CHECK(gamma_lz(q, ref, TriangleWave{0.1, 0.0}) == 0.0);

  // One defect crossing at +2 V: two crossings per period.
  TlsDefect d = TlsDefect::from_user_units(0.0, 4.0, 0.05, 10.0, 1.0, 1.0, 100.0);
  const double s = std::sqrt(4.5 * 4.5 - 16.0);
  d.epsilon0 = s - 0.05 * 2.0;
  const BathState one = single(d);
  const TriangleWave w{0.1, 16.0};
  const double g_cross = d.g_bare * 4.0 / 4.5;
  const double rate = 0.05 * s / 4.5 * units::kGhzToRadPerUs * 3.2e-6;
  const double expected = 2.0 * 0.1e-6 * lz_crossing_probability(g_cross, rate);
  CHECK(gamma_lz(q, one, w) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(gamma_lz(q, one, TriangleWave{0.1, 3.0}) == 0.0);

  // Reference bath, adiabatic crossings: same f·vpp gives nearly the same rate.
  const double a = gamma_lz(q, ref, TriangleWave{0.1, 16.0});
  const double b = gamma_lz(q, ref, TriangleWave{0.2, 8.0});
  CHECK(a > 0.0);
  CHECK(b == doctest::Approx(a).epsilon(0.10));
}

TEST_CASE("total rate is the sum of its parts") {
  QubitSpec q;
  CHECK(gamma_total(q, BathState{}, 0.0, 0.0, std::nullopt) == q.gamma0_per_us);
  const BathState ref = sample_bath(BathConfig{}, 1);
  const TriangleWave w{0.1, 16.0};
  const double parts = q.gamma0_per_us + gamma_tls(q, ref, 2.0) + gamma_qp(120.0, q) + gamma_lz(q, ref, w);
  CHECK(gamma_total(q, ref, 2.0, 120.0, w) == doctest::Approx(parts).epsilon(1e-14));
  const double cold = gamma_total(q, ref, 0.0, 10.0, std::nullopt);
  CHECK(gamma_qp(10.0, q) < 1e-12 * cold);
  CHECK(cold == doctest::Approx(q.gamma0_per_us + gamma_tls(q, ref, 0.0)).epsilon(1e-12));
}

TEST_CASE("gaussian average survival") {
  CHECK(gaussian_average_survival(0.7, 0.0, 3.0).value == doctest::Approx(std::exp(-2.1)).epsilon(1e-15));
  CHECK(gaussian_average_survival(0.7, 0.3, 0.0).value == 1.0);
  CHECK(gaussian_average_survival(1.0, 0.5, 1.0).value == doctest::Approx(std::exp(-0.875)).epsilon(1e-15));
  CHECK(gaussian_average_survival(1.0, 0.5, 1.0).value == doctest::Approx(0.41686).epsilon(1e-4));
  CHECK(gaussian_average_survival(1.0, 0.5, 1.0).valid);
  CHECK_FALSE(gaussian_average_survival(1.0, 0.5, 8.0).valid);
  CHECK_THROWS_AS(gaussian_average_survival(0.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_average_survival(-1.0, 0.5, 1.0), std::invalid_argument);
  for (double s = 0.0; s < 1.0; s += 0.1) {
    for (double t = 0.0; t < 5.0; t += 0.25) {
      CHECK(gaussian_average_survival(1.0, s, t).value >= std::exp(-t));
    }
  }
}

TEST_CASE("qubit and waveform validation") {
  QubitSpec q;
  q.f_q_ghz = 0.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  q = QubitSpec{};
  q.read_err_e = 0.6;
  CHECK_THROWS(q.validate());
  CHECK_THROWS(TriangleWave{0.0, 16.0}.validate());
  CHECK_THROWS(TriangleWave{0.1, -1.0}.validate());
}

}

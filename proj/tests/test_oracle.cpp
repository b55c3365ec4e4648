#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phasespace/fermion.hpp"
#include "phasespace/oracle.hpp"
#include "reference.hpp"

using namespace phasespace;

TEST_SUITE("oracle") {

TEST_CASE("boson Fock basis sectors") {
  oracle::FockBasisBoson basis(3, 5);
  std::size_t total = 0;
  for (std::size_t n = 0; n <= 5; ++n) {
    const auto& s = basis.sector(n);
    CHECK(s.size() == (n + 2) * (n + 1) / 2);
    total += s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::size_t sum = 0;
      for (auto k : s[i]) sum += k;
      CHECK(sum == n);
      CHECK(basis.index(s[i]) == i);
    }
  }
  CHECK(basis.dimension() == total);
  CHECK(oracle::coherent_cutoff(100.0) >= 190);
}

TEST_CASE("Kerr closed form against an independent Fock sum and against ED") {
  const Complex alpha{std::sqrt(10.0), 0.0};
  const std::vector<double> times{0.0, 0.05, 0.2, 0.7, 1.5, 3.14159};
  const auto ed = oracle::ed_bose_evolve(BoseLatticeModel::single_mode(0.0, 0.5),
                                         std::span<const Complex>(&alpha, 1), times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    CAPTURE(t);
    const Complex closed = oracle::kerr_amplitude(alpha, 0.0, 0.5, t);
    CHECK(std::abs(closed - reference::kerr_amplitude_sum(alpha, 0.5, t)) < 1e-12);
    CHECK(std::abs(closed - ed.moments[k].a[0]) < 1e-8);
    CHECK(std::abs(oracle::kerr_amplitude_squared(alpha, 0.0, 0.5, t) - ed.moments[k].a2[0]) <
          1e-8);
    // Var(X) from the ED moments.
    for (double th : {0.0, 0.5 * std::numbers::pi, 0.7}) {
      const Complex e = std::exp(Complex{0.0, -th});
      const auto& m = ed.moments[k];
      const double x = 2.0 * (m.a[0] * e).real();
      const double x2 = 2.0 * (m.a2[0] * e * e).real() + 2.0 * m.adag_a[0].real() + 1.0;
      CHECK(oracle::kerr_quadrature_variance(alpha, 0.0, 0.5, t, th) ==
            doctest::Approx(x2 - x * x).epsilon(1e-8));
    }
  }
}

TEST_CASE("Kerr closed form with a linear frequency") {
  const Complex alpha{1.0, 0.5};
  const double omega = 0.8, chi = 0.3;
  const auto ed = oracle::ed_bose_evolve(BoseLatticeModel::single_mode(omega, chi),
                                         std::span<const Complex>(&alpha, 1),
                                         std::vector<double>{0.9});
  CHECK(std::abs(oracle::kerr_amplitude(alpha, omega, chi, 0.9) - ed.moments[0].a[0]) < 1e-9);
}

TEST_CASE("Bose-Hubbard ED against a Kronecker-product reference") {
  for (double chi : {0.1, 1.0}) {
    CAPTURE(chi);
    const auto model = BoseLatticeModel::chain(2, 1.0, chi);
    const std::vector<Complex> alpha{{std::sqrt(3.0), 0.0}, {1.0, 0.0}};
    const std::vector<double> times{0.0, 0.7, 2.0};
    const auto ed = oracle::ed_bose_evolve(model, alpha, times);
    const std::vector<std::vector<reference::cplx>> omega{{0.0, -1.0}, {-1.0, 0.0}};
    const auto ref = reference::bose_evolve(omega, chi, alpha, 30, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(ed.moments[k].number_moment(j, j).real() == doctest::Approx(ref[k].n[j]).epsilon(1e-8));
        CHECK(ed.moments[k].g2(j, j) == doctest::Approx(ref[k].g2[j]).epsilon(1e-8));
        CHECK(std::abs(ed.moments[k].a[j] - ref[k].a[j]) < 1e-8);
      }
    }
    CHECK(ed.norm_deficit < 1e-10);
  }
}

TEST_CASE("oracle refuses truncations it cannot honour") {
  const std::vector<Complex> alpha{{2.0, 0.0}};
  oracle::BoseOracleOptions tight;
  tight.n_max = 5;
  CHECK_THROWS_AS(oracle::ed_bose_evolve(BoseLatticeModel::single_mode(0.0, 0.5), alpha,
                                         std::vector<double>{0.1}, tight),
                  CutoffError);
  oracle::BoseOracleOptions small;
  small.max_dimension = 10;
  const std::vector<Complex> three{{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(oracle::ed_bose_evolve(BoseLatticeModel::chain(3, 1.0, 0.1), three,
                                         std::vector<double>{0.1}, small),
                  SizeError);
}

TEST_CASE("fermion hop signs follow the mode ordering") {
  std::uint32_t out = 0;
  int sign = 0;
  // |modes 0 and 2>: move the particle in mode 0 to mode 1 (nothing in between).
  REQUIRE(oracle::FockBasisFermi::hop(0b0101, 1, 0, out, sign));
  CHECK(out == 0b0110);
  CHECK(sign == 1);
  // Moving it to mode 3 passes the particle in mode 2.
  REQUIRE(oracle::FockBasisFermi::hop(0b0101, 3, 0, out, sign));
  CHECK(out == 0b1100);
  CHECK(sign == -1);
  CHECK_FALSE(oracle::FockBasisFermi::hop(0b0101, 2, 0, out, sign));
  CHECK_FALSE(oracle::FockBasisFermi::hop(0b0101, 3, 1, out, sign));
}

TEST_CASE("Hubbard ED against a Jordan-Wigner reference") {
  struct Case {
    FermiHubbardModel model;
    std::vector<std::vector<double>> hop;
  };
  const std::vector<Case> cases{
      {FermiHubbardModel::chain(4, 1.0, 2.0, 0.5), reference::chain_hopping(4, 1.0)},
      {FermiHubbardModel::chain(4, 1.0, 2.0, 1.0), reference::chain_hopping(4, 1.0)},
      {FermiHubbardModel::rectangle(2, 2, 1.0, 4.0, 2.0), reference::rectangle_hopping(2, 2, 1.0)},
      {FermiHubbardModel::chain(3, 0.7, 3.0, -0.4, true), reference::chain_hopping(3, 0.7, true)},
  };
  const std::vector<double> taus{0.0, 0.5, 2.0, 4.0};
  for (const auto& c : cases) {
    const auto ed = oracle::ed_fermi_thermal(c.model, taus);
    const auto ref = reference::fermi_thermal(c.hop, c.model.U, c.model.mu, taus);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      CAPTURE(taus[k]);
      double n = 0.0;
      for (std::size_t j = 0; j < c.model.sites; ++j) n += ed[k].density_up[j] + ed[k].density_down[j];
      n /= 2.0 * c.model.sites;
      CHECK(ed[k].double_occupancy == doctest::Approx(ref[k].double_occupancy).epsilon(1e-10));
      CHECK(ed[k].energy == doctest::Approx(ref[k].energy).epsilon(1e-10));
      CHECK(n == doctest::Approx(ref[k].density).epsilon(1e-10));
    }
  }
}

TEST_CASE("single-site and infinite-temperature limits") {
  const double U = 3.0, mu = 0.7;
  const std::vector<double> taus{0.0, 0.4, 1.7};
  const auto ed = oracle::ed_fermi_thermal(FermiHubbardModel::chain(1, 1.0, U, mu), taus);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double t = taus[k];
    const double z = 1.0 + 2.0 * std::exp(t * mu) + std::exp(-t * (U - 2.0 * mu));
    const double d = std::exp(-t * (U - 2.0 * mu)) / z;
    CHECK(ed[k].double_occupancy == doctest::Approx(d).epsilon(1e-13));
    CHECK(ed[k].energy == doctest::Approx(U * d).epsilon(1e-13));
  }
  const auto hot = oracle::ed_fermi_thermal(FermiHubbardModel::chain(4, 1.0, 2.0, 0.5),
                                            std::vector<double>{0.0});
  CHECK(hot[0].double_occupancy == doctest::Approx(0.25).epsilon(1e-14));
  for (double v : hot[0].density_up) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("free fermions: ED agrees with single-particle modes") {
  const auto model = FermiHubbardModel::rectangle(2, 2, 1.0, 0.0, 0.3);
  const std::vector<double> taus{0.0, 1.0, 4.0};
  const auto ed = oracle::ed_fermi_thermal(model, taus);
  const auto free = oracle::free_fermion_thermal(model, taus);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    CHECK(ed[k].double_occupancy == doctest::Approx(free[k].double_occupancy).epsilon(1e-12));
    CHECK(ed[k].energy == doctest::Approx(free[k].energy).epsilon(1e-12));
  }
}

}  // TEST_SUITE

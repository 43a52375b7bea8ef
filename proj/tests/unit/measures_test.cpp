#include <cmath>
#include <numbers>
#include <random>

#include "convpot/measures.hpp"
#include "convpot/zeros.hpp"
#include "doctest.h"

using namespace convpot;
using namespace std::complex_literals;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryMeasure random_measure(std::mt19937_64& rng, const std::vector<double>& grid, int atoms) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  BoundaryMeasure m;
  m.grid = grid;
  m.cumulative.push_back(0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) m.cumulative.push_back(m.cumulative.back() + U(rng));
  for (int k = 0; k < atoms; ++k) m.atoms.push_back({grid[1 + rng() % (grid.size() - 2)], U(rng)});
  double total = m.cumulative.back() + m.atom_mass();
  for (auto& c : m.cumulative) c /= total;
  for (auto& a : m.atoms) a.mass /= total;
  m.total = 1.0;
  return m;
}

std::vector<double> uniform_grid(double P, int n) {
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(P * i / n);
  return g;
}

// sup over arcs with grid endpoints, continuous measures only
double brute_force_D(const BoundaryMeasure& a, const BoundaryMeasure& b) {
  const double P = a.grid.back();
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < a.grid.size(); ++i)
    for (std::size_t j = 0; j + 1 < a.grid.size(); ++j) {
      double len = a.grid[j] - a.grid[i];
      if (len < 0.0) len += P;
      const BoundaryArc arc{a.grid[i], len};
      best = std::max(best, std::abs(a.arc_mass(arc) - b.arc_mass(arc)));
    }
  return best;
}

}  // namespace

TEST_CASE("equilibrium measure closed cases") {
  const ConvexDomain disk(DomainSpec::disk(0.0, 1.0));
  const auto em = ExteriorMap::build(disk);
  const auto g = measure_grid(em);
  const auto mu = equilibrium_boundary_measure(em, g);
  CHECK(mu.total == doctest::Approx(1.0));
  for (std::size_t i = 0; i < g.size(); i += 7) CHECK(mu.cumulative[i] == doctest::Approx(g[i] / (2 * kPi)).epsilon(1e-12));

  const ConvexDomain sq(DomainSpec::regular_polygon(4));
  const auto es = ExteriorMap::build(sq);
  const auto ms = equilibrium_boundary_measure(es, measure_grid(es));
  const double side = sq.perimeter() / 4;
  for (int k = 1; k <= 3; ++k) CHECK(ms.arc_mass({0.0, k * side}) == doctest::Approx(0.25 * k).epsilon(1e-12));
  CHECK(ms.cumulative.back() == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 1; i < ms.cumulative.size(); ++i) CHECK(ms.cumulative[i] >= ms.cumulative[i - 1]);
}

TEST_CASE("arc masses from cumulative values match direct evaluation and survive refinement") {
  const ConvexDomain d(DomainSpec::polygon({0.0, 2.0, 2.5 + 1i, 0.5 + 1.5i}));
  const auto em = ExteriorMap::build(d);
  auto g = measure_grid(em);
  const auto mu = equilibrium_boundary_measure(em, g);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<BoundaryArc> arcs;
  for (int i = 0; i < 100; ++i) arcs.push_back({U(rng) * d.perimeter(), U(rng) * d.perimeter()});
  // endpoints next to the corners, where the correspondence is singular
  for (const double v : d.vertex_s())
    for (int k = 3; k <= 12; ++k) {
      const double eps = std::pow(10.0, -k);
      arcs.push_back({d.wrap(v + eps), 1.0});
      arcs.push_back({d.wrap(v - eps), 0.5 * eps + 0.3});
    }
  for (const auto& arc : arcs) CHECK(std::abs(mu.arc_mass(arc) - em.equilibrium_measure(arc)) <= 1e-9);

  for (int i = 0; i < 50; ++i) g.push_back(U(rng) * d.perimeter());
  std::sort(g.begin(), g.end());
  const auto fine = equilibrium_boundary_measure(em, g);
  for (const auto& arc : arcs) CHECK(std::abs(mu.arc_mass(arc) - fine.arc_mass(arc)) <= 1e-9);
}

TEST_CASE("balayage of centered zeros on the disk is the equilibrium measure") {
  const ConvexDomain disk(DomainSpec::disk(0.0, 1.0));
  const auto em = ExteriorMap::build(disk);
  const auto im = InteriorMap::build(disk);
  ZeroSet zs;
  zs.degree = 4;
  zs.zeros.assign(4, 0.0);
  zs.flags.assign(4, Location::Interior);
  const auto g = measure_grid(em, &im, &zs);
  const auto tau = balayage_measure(im, zs, g);
  CHECK(tau.total == doctest::Approx(1.0));
  CHECK(discrepancy(equilibrium_boundary_measure(em, g), tau).D <= 1e-6);
}

TEST_CASE("balayage does not depend on the interior anchor") {
  const ConvexDomain d(DomainSpec::polygon({0.0, 2.0, 2.5 + 1i, 0.5 + 1.5i}));
  const auto seq = orthonormalize(InnerProductEngine::build(d, Weight::unit(), 12), 12);
  const auto zs = zeros_of(seq, 12, d);
  const auto em = ExteriorMap::build(d);
  const auto a = InteriorMap::build(d);
  const auto b = InteriorMap::build(d, 0.4 + 0.3i);
  const auto g = measure_grid(em, &a, &zs);
  CHECK(discrepancy(balayage_measure(a, zs, g), balayage_measure(b, zs, g)).D <= 1e-8);
}

TEST_CASE("boundary zeros become atoms; exterior zeros are rejected") {
  const ConvexDomain sq(DomainSpec::regular_polygon(4));
  const auto em = ExteriorMap::build(sq);
  const auto im = InteriorMap::build(sq);
  const double s_star = 0.4;
  ZeroSet zs;
  zs.degree = 2;
  zs.zeros = {sq.boundary_point(s_star).z, 0.1 + 0.2i};
  zs.flags = {Location::Boundary, Location::Interior};
  const auto tau = balayage_measure(im, zs, measure_grid(em, &im, &zs));
  REQUIRE(tau.atoms.size() == 1);
  CHECK(tau.atoms[0].s == doctest::Approx(s_star).epsilon(1e-12));
  CHECK(tau.atoms[0].mass == doctest::Approx(0.5));
  CHECK(tau.cumulative.back() + tau.atom_mass() == doctest::Approx(1.0).epsilon(1e-12));

  zs.zeros[1] = 3.0;
  zs.flags[1] = Location::Exterior;
  CHECK_THROWS_AS(balayage_measure(im, zs, measure_grid(em)), Error);
}

TEST_CASE("discrepancy is symmetric, subadditive and equals the sup over arcs") {
  std::mt19937_64 rng(99);
  const auto g = uniform_grid(5.0, 60);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_measure(rng, g, trial % 3), b = random_measure(rng, g, 2), c = random_measure(rng, g, 0);
    CHECK(discrepancy(a, a).D == 0.0);
    CHECK(discrepancy(a, b).D == doctest::Approx(discrepancy(b, a).D).epsilon(1e-14));
    CHECK(discrepancy(a, c).D <= discrepancy(a, b).D + discrepancy(b, c).D + 1e-14);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_measure(rng, uniform_grid(1.0, 25), 0), b = random_measure(rng, uniform_grid(1.0, 25), 0);
    CHECK(discrepancy(a, b).D == doctest::Approx(brute_force_D(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("a point mass against a continuous measure has discrepancy one") {
  BoundaryMeasure atom, flat;
  atom.grid = flat.grid = uniform_grid(2.0, 40);
  atom.cumulative.assign(41, 0.0);
  atom.atoms = {{0.7, 1.0}};
  atom.total = flat.total = 1.0;
  for (double s : flat.grid) flat.cumulative.push_back(s / 2.0);
  CHECK(discrepancy(atom, flat).D == doctest::Approx(1.0).epsilon(1e-12));
  flat.grid.back() = 2.5;
  CHECK_THROWS_AS(discrepancy(atom, flat), Error);
}

TEST_CASE("potentials of boundary measures") {
  const ConvexDomain disk(DomainSpec::disk(0.0, 1.0));
  const auto em = ExteriorMap::build(disk);
  const auto mu = equilibrium_boundary_measure(em, uniform_grid(disk.perimeter(), 4096));
  CHECK(potential_of_measure(mu, disk, 2.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
  CHECK_THROWS_AS(potential_of_measure(mu, disk, 1.0), Error);

  BoundaryMeasure pt;
  pt.grid = uniform_grid(disk.perimeter(), 16);
  pt.cumulative.assign(17, 0.0);
  pt.atoms = {{0.0, 1.0}};
  pt.total = 1.0;
  CHECK(potential_of_measure(pt, disk, 3.0 + 1i) == doctest::Approx(-std::log(std::abs(2.0 + 1i))).epsilon(1e-14));
}

TEST_CASE("potential gap") {
  const ConvexDomain disk(DomainSpec::disk(0.0, 1.0));
  const auto ed = ExteriorMap::build(disk);
  const auto sd = orthonormalize(InnerProductEngine::build(disk, Weight::unit(), 10), 10);
  const auto pd = BoundaryProbe::build(ed);
  for (int n : {1, 5, 10}) CHECK(potential_gap(sd, n, ed, pd).epsilon <= 1e-8);

  // square: eps_n of order log n / n
  const ConvexDomain sq(DomainSpec::regular_polygon(4));
  const auto es = ExteriorMap::build(sq);
  const auto ss = orthonormalize(InnerProductEngine::build(sq, Weight::unit(), 40), 40);
  const auto ps = BoundaryProbe::build(es);
  double lo = INFINITY, hi = 0.0;
  for (int n : {2, 5, 10, 20, 30, 40}) {
    const auto r = potential_gap(ss, n, es, ps);
    CHECK(r.epsilon >= 0.0);
    const double c4 = r.epsilon * n / std::log(n);
    lo = std::min(lo, c4);
    hi = std::max(hi, c4);
  }
  CHECK(hi / lo < 3.0);
}

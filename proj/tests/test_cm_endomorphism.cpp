#include <doctest.h>

#include <algorithm>
#include <random>

#include "ribet/cm_endomorphism.hpp"
#include "ribet/divisor.hpp"
#include "ribet/errors.hpp"

using namespace ribet;

namespace {

std::shared_ptr<const CMStructure> gaussian(const char* field) {
  return CMStructure::create(Curve::create(FieldSpec::parse(field), 1, 0), CMKind::gaussian);
}

std::shared_ptr<const CMStructure> eisenstein(const char* field) {
  return CMStructure::create(Curve::create(FieldSpec::parse(field), 0, 2), CMKind::eisenstein);
}

CurvePoint pick(const Curve& E, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> d(0, E.group_order() - 1);
  return E.point_at(d(rng));
}

}  // namespace

TEST_CASE("Endo arithmetic in the orders") {
  const auto g = CMKind::gaussian, e = CMKind::eisenstein;
  CHECK(Endo::iota(g).degree() == 1);
  CHECK(Endo::integer(g, 2).degree() == 4);
  CHECK((Endo{g, 1, 1}).degree() == 2);
  CHECK(Endo::iota(e).degree() == 1);
  CHECK((Endo{e, 1, 1}).degree() == 1);
  CHECK((Endo{e, 2, 1}).degree() == 3);
  CHECK(Endo::iota(g) * Endo::iota(g) == Endo::integer(g, -1));
  // zeta^2 = -1 - zeta
  CHECK(Endo::iota(e) * Endo::iota(e) == Endo{e, -1, -1});

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> c(-9, 9);
  for (auto kind : {g, e}) {
    for (int i = 0; i < 20; ++i) {
      Endo u{kind, c(rng), c(rng)}, v{kind, c(rng), c(rng)};
      CHECK((u * v).degree() == u.degree() * v.degree());
      CHECK(u * u.rosati_dual() == Endo::integer(kind, u.degree()));
      CHECK(u + u.rosati_dual() == Endo::integer(kind, u.trace()));
      CHECK(u.rosati_dual().rosati_dual() == u);
      CHECK((u.degree() == 0) == u.is_zero());
      CHECK(Endo::parse(u.to_string(), kind) == u);
    }
  }
}

TEST_CASE("Endo literals") {
  CHECK(Endo::parse("i") == Endo{CMKind::gaussian, 0, 1});
  CHECK(Endo::parse("1+i") == Endo{CMKind::gaussian, 1, 1});
  CHECK(Endo::parse("2 - 3*i") == Endo{CMKind::gaussian, 2, -3});
  CHECK(Endo::parse("-1+2*zeta") == Endo{CMKind::eisenstein, -1, 2});
  CHECK(Endo::parse("2", CMKind::eisenstein) == Endo{CMKind::eisenstein, 2, 0});
  CHECK((Endo{CMKind::gaussian, 1, -2}).to_string() == "1-2*i");
  CHECK_THROWS_AS(Endo::parse(""), ConfigError);
  CHECK_THROWS_AS(Endo::parse("1+j"), ConfigError);
  CHECK_THROWS_AS(Endo::parse("i+zeta"), ConfigError);
  CHECK_THROWS_AS(Endo::parse("*i"), ConfigError);
}

TEST_CASE("gaussian action on y^2 = x^3 + x over F_13") {
  auto cm = gaussian("13");
  const auto& E = cm->curve();
  const auto& F = E.field();
  CHECK(cm->root() == F.from_int(5));  // smaller square root of -1
  for (const auto& P : E.enumerate_points()) {
    const auto iP = cm->iota(P);
    CHECK(E.is_on_curve(iP));
    if (!P.is_infinity()) {
      CHECK(iP.x() == -P.x());
      CHECK(iP.y() == F.from_int(5) * P.y());
    }
    CHECK(cm->apply(Endo::integer(CMKind::gaussian, 1), P) == P);
    CHECK(cm->iota(iP) == E.neg(P));
  }
  CHECK(cm->kernel(Endo::integer(CMKind::gaussian, 1)) == std::vector<CurvePoint>{CurvePoint::infinity()});
  CHECK(cm->kernel(Endo::iota(CMKind::gaussian)) == std::vector<CurvePoint>{CurvePoint::infinity()});
  // x^3 + x = x (x - 5)(x + 5) splits, so E[2] is rational
  CHECK(cm->kernel(Endo::integer(CMKind::gaussian, 2)).size() == 4);
}

TEST_CASE("eisenstein action on y^2 = x^3 + 2 over F_13") {
  auto cm = eisenstein("13");
  const auto& E = cm->curve();
  const auto& F = E.field();
  const auto z = cm->root();
  CHECK((z * z + z + F.one()).is_zero());
  CHECK(z == F.from_int(3));  // cube roots of unity mod 13: 1, 3, 9
  for (const auto& P : E.enumerate_points()) {
    const auto zP = cm->iota(P);
    CHECK(E.is_on_curve(zP));
    if (!P.is_infinity()) CHECK(zP.x() == z * P.x());
    // iota^2 + iota + 1 = 0 as point maps
    CHECK(E.add(E.add(cm->iota(zP), zP), P).is_infinity());
  }
}

TEST_CASE("ring structure matches composition of point maps") {
  for (auto cm : {gaussian("13^2"), eisenstein("13^2")}) {
    const auto& E = cm->curve();
    const auto kind = cm->kind();
    std::mt19937_64 rng(5);
    const std::vector<Endo> us = {{kind, 0, 1}, {kind, 1, 1}, {kind, 2, 0}, {kind, 2, 1}, {kind, -3, 2}};
    for (const auto& u : us) {
      for (const auto& v : us) {
        for (int i = 0; i < 10; ++i) {
          auto P = pick(E, rng);
          CHECK(cm->apply(u * v, P) == cm->apply(u, cm->apply(v, P)));
          CHECK(cm->apply(u + v, P) == E.add(cm->apply(u, P), cm->apply(v, P)));
        }
      }
      for (int i = 0; i < 50; ++i) {
        auto P = pick(E, rng);
        CHECK(cm->apply(u.rosati_dual(), cm->apply(u, P)) == E.scalar_mul(u.degree(), P));
        CHECK(E.add(cm->apply(u, P), cm->apply(u.rosati_dual(), P)) == E.scalar_mul(u.trace(), P));
      }
    }
  }
}

TEST_CASE("kernels against brute-force filtering") {
  for (auto cm : {gaussian("13^2"), eisenstein("13^2"), gaussian("13^4")}) {
    const auto& E = cm->curve();
    const auto kind = cm->kind();
    const auto pts = E.enumerate_points();
    for (const Endo& u : {Endo{kind, 0, 1}, Endo{kind, 1, 1}, Endo{kind, 2, 0}, Endo{kind, 2, 1}, Endo{kind, 1, -2}}) {
      std::vector<CurvePoint> expect;
      for (const auto& P : pts)
        if (cm->apply(u, P).is_infinity()) expect.push_back(P);
      CHECK(cm->kernel(u) == expect);
      const auto d = static_cast<std::uint64_t>(u.degree());
      if (d % E.field().characteristic() != 0 && E.has_full_torsion(d)) CHECK(expect.size() == d);
    }
  }
}

TEST_CASE("pullback and pushforward") {
  auto cm = gaussian("13^4");
  const auto& E = cm->curve();
  std::mt19937_64 rng(9);
  for (const Endo& u : {Endo{CMKind::gaussian, 0, 1}, Endo{CMKind::gaussian, 1, 1}, Endo{CMKind::gaussian, 2, 1},
                        Endo{CMKind::gaussian, 2, 0}}) {
    CAPTURE(u.to_string());
    const auto kernel = cm->kernel(u);
    if (kernel.size() != static_cast<std::size_t>(u.degree())) continue;
    for (int i = 0; i < 10; ++i) {
      // Points in the image of u have all their preimages rational.
      Divisor D(E);
      for (int k = 0; k < 3; ++k) D.add_point(cm->apply(u, pick(E, rng)), k + 1);
      D.add_point(cm->apply(u, pick(E, rng)), -2);
      const auto up = cm->pullback(u, D);
      CHECK(up.degree() == u.degree() * D.degree());
      CHECK(cm->pushforward(u, up) == u.degree() * D);
      CHECK(cm->pushforward(u, D).degree() == D.degree());
      CHECK(cm->pushforward(u, D).sum_point() == cm->apply(u, D.sum_point()));
      for (const auto& [T, c] : up.terms()) CHECK(D.multiplicity(cm->apply(u, T)) == c);

      const auto S = cm->apply(u, pick(E, rng));
      if (S == E.neg(S)) continue;
      const auto sym = Divisor::point(E, S) - Divisor::point(E, E.neg(S));
      CHECK(cm->pullback(u, sym).sum_point() == E.scalar_mul(2, cm->apply(u.rosati_dual(), S)));
    }
  }
  const auto one = Endo::integer(CMKind::gaussian, 1);
  auto D = Divisor::point(E, E.point_at(5), 2) - Divisor::point(E, E.point_at(9));
  CHECK(cm->pullback(one, D) == D);
  CHECK(cm->pushforward(one, D) == D);
  const auto q = E.find_points_of_order(5).front();
  const auto iota = Endo::iota(CMKind::gaussian);
  CHECK(cm->pushforward(iota, Divisor::point(E, q) - Divisor::point(E, E.neg(q))) ==
        Divisor::point(E, cm->iota(q)) - Divisor::point(E, E.neg(cm->iota(q))));
}

TEST_CASE("CM errors") {
  auto F13 = FieldSpec::parse("13");
  CHECK_THROWS_AS(CMStructure::create(Curve::create(F13, 1, 1), CMKind::gaussian), InvalidCM);
  CHECK_THROWS_AS(CMStructure::create(Curve::create(F13, 1, 0), CMKind::eisenstein), InvalidCM);
  // 19 = 3 mod 4 has no square root of -1; 11 = 2 mod 3 has no cube root of unity
  CHECK_THROWS_AS(CMStructure::create(Curve::create(FieldSpec::parse("19"), 1, 0), CMKind::gaussian), InvalidCM);
  CHECK_THROWS_AS(CMStructure::create(Curve::create(FieldSpec::parse("11"), 0, 2), CMKind::eisenstein), InvalidCM);

  auto cm = gaussian("13");
  const auto& E = cm->curve();
  const Endo zero{CMKind::gaussian, 0, 0};
  CHECK_THROWS_AS(cm->kernel(zero), ZeroEndomorphism);
  CHECK_THROWS_AS(cm->pullback(zero, Divisor(E)), ZeroEndomorphism);
  CHECK_THROWS_AS(cm->pushforward(zero, Divisor(E)), ZeroEndomorphism);
  CHECK_THROWS_AS(cm->apply(Endo::iota(CMKind::eisenstein), E.point_at(1)), InvalidEndomorphism);

  // Over F_13, #E = 20 and [3] is a bijection on E(F_13), but deg [3] = 9:
  // every point has one rational preimage only.
  CHECK_THROWS_AS(cm->pullback(Endo::integer(CMKind::gaussian, 3), Divisor::point(E, E.point_at(1))),
                  PreimageNotRational);
}

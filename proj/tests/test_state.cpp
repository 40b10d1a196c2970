#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "dce/state.hpp"

using namespace dce;
using Catch::Approx;

namespace {

SystemSpec small_spec(int levels, int cutoff) {
    SystemSpec s;
    s.levels = levels;
    s.fock_cutoff = cutoff;
    s.g = 0.01;
    s.epsilon = 1e-3;
    return s;
}

StateVector random_parity_state(int levels, int cutoff, unsigned seed) {
    // supported on the (j+k odd) sector only, like any evolution of |1,0>
    StateVector s(levels, cutoff);
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    for (int j = 1; j <= levels; ++j)
        for (int k = (j % 2 == 0) ? 1 : 0; k <= cutoff; k += 2)
            s.at(j, k) = {dist(rng), dist(rng)};
    s.normalize();
    return s;
}

} // namespace

TEST_CASE("vacuum state has the single unit amplitude p_{1,0}") {
    StateVector s = StateVector::vacuum(small_spec(3, 10));
    CHECK(s.at(1, 0) == Complex(1.0, 0.0));
    CHECK(s.norm_squared() == 1.0);
    CHECK(s.time == 0.0);
    auto pk = photon_distribution(s);
    CHECK(pk[0] == 1.0);
    for (std::size_t k = 1; k < pk.size(); ++k) CHECK(pk[k] == 0.0);
    auto pj = detector_distribution(s);
    CHECK(pj[0] == 1.0);
    CHECK(pj[1] == 0.0);
}

TEST_CASE("vacuum construction validates the spec") {
    SystemSpec bad = small_spec(0, 10);
    CHECK_THROWS_AS(StateVector::vacuum(bad), std::invalid_argument);
    bad = small_spec(3, 1);
    CHECK_THROWS_AS(StateVector::vacuum(bad), std::invalid_argument);
    SystemSpec ho = small_spec(3, 10);
    ho.detector_kind = DetectorKind::HarmonicOscillatorTruncated;
    CHECK_THROWS_AS(StateVector::vacuum(ho), std::invalid_argument); // needs N >= 4
}

TEST_CASE("mean photon number") {
    StateVector s = StateVector::vacuum(small_spec(3, 10));
    CHECK(mean_photon(s) == 0.0);

    // (|1,0> + |1,2>)/sqrt(2)
    StateVector t(3, 10);
    t.at(1, 0) = 1.0 / std::sqrt(2.0);
    t.at(1, 2) = 1.0 / std::sqrt(2.0);
    CHECK(mean_photon(t) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Mandel Q: undefined for vacuum, -1 for Fock states") {
    StateVector vac = StateVector::vacuum(small_spec(3, 10));
    CHECK_FALSE(mandel_q(vac).has_value());

    StateVector fock(3, 10);
    fock.at(1, 2) = 1.0;
    auto q = mandel_q(fock);
    REQUIRE(q.has_value());
    CHECK(*q == Approx(-1.0).margin(1e-14));
}

TEST_CASE("quadrature moments of the vacuum") {
    StateVector s = StateVector::vacuum(small_spec(2, 8));
    auto m = quadrature_moments(s);
    CHECK(m.x_var == Approx(0.5).margin(1e-15));
    CHECK(m.p_var == Approx(0.5).margin(1e-15));
    CHECK(m.x_mean == 0.0);
    CHECK(m.p_mean == 0.0);
    CHECK(m.xp_cov == 0.0);
}

TEST_CASE("quadrature means vanish identically on the parity sector") {
    for (unsigned seed : {1u, 2u, 3u}) {
        StateVector s = random_parity_state(4, 12, seed);
        auto m = quadrature_moments(s);
        CHECK(std::abs(m.x_mean) < 1e-15);
        CHECK(std::abs(m.p_mean) < 1e-15);
        // uncertainty relation with covariance
        CHECK(m.x_var * m.p_var - m.xp_cov * m.xp_cov >= 0.25 - 1e-9);
    }
}

TEST_CASE("photon and level distributions") {
    StateVector s(3, 10);
    s.at(1, 0) = 1.0 / std::sqrt(2.0);
    s.at(3, 2) = 1.0 / std::sqrt(2.0);
    auto pk = photon_distribution(s);
    CHECK(pk[0] == Approx(0.5).epsilon(1e-15));
    CHECK(pk[2] == Approx(0.5).epsilon(1e-15));
    auto pj = detector_distribution(s);
    CHECK(pj[0] == Approx(0.5).epsilon(1e-15));
    CHECK(pj[2] == Approx(0.5).epsilon(1e-15));

    // parity bookkeeping: even-j probability only collects odd-k terms
    StateVector r = random_parity_state(4, 11, 7u);
    double p2_direct = 0.0;
    for (int k = 1; k <= 11; k += 2) p2_direct += std::norm(r.at(2, k));
    CHECK(detector_distribution(r)[1] == Approx(p2_direct).margin(1e-15));
}

TEST_CASE("field purity: product and entangled states") {
    // |1> x (|0>+|2>)/sqrt(2): pure reduced field state
    StateVector prod(3, 10);
    prod.at(1, 0) = 1.0 / std::sqrt(2.0);
    prod.at(1, 2) = 1.0 / std::sqrt(2.0);
    CHECK(field_purity(prod) == Approx(1.0).epsilon(1e-14));

    // (|1,0> + |2,1>)/sqrt(2): maximally entangled qubit pair
    StateVector ent(3, 10);
    ent.at(1, 0) = 1.0 / std::sqrt(2.0);
    ent.at(2, 1) = 1.0 / std::sqrt(2.0);
    CHECK(field_purity(ent) == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("field purity agrees between detector-side and field-side Gram matrices") {
    // N > K+1 forces the field-side branch; compare against a copy with
    // padded cutoff that takes the detector-side branch
    StateVector s(6, 3); // N > K+1 picks the field-side Gram
    std::mt19937 rng(11);
    std::normal_distribution<double> dist;
    for (int j = 1; j <= 6; ++j)
        for (int k = 0; k <= 3; ++k) s.at(j, k) = {dist(rng), dist(rng)};
    s.normalize();

    StateVector wide(6, 8);
    for (int j = 1; j <= 6; ++j)
        for (int k = 0; k <= 3; ++k) wide.at(j, k) = s.at(j, k);
    CHECK(field_purity(s) == Approx(field_purity(wide)).epsilon(1e-13));
}

TEST_CASE("purity bounds on random states") {
    for (unsigned seed : {3u, 5u, 9u}) {
        StateVector s = random_parity_state(5, 9, seed);
        double mu = field_purity(s);
        CHECK(mu <= 1.0 + 1e-12);
        CHECK(mu >= 1.0 / (9 + 1));
    }
}

TEST_CASE("observe assembles a consistent record") {
    StateVector s = random_parity_state(4, 12, 21u);
    ObservableRecord r = observe(s);
    double sum_level = 0.0, sum_photon = 0.0;
    for (double p : r.level_probs) sum_level += p;
    for (double p : r.photon_probs) sum_photon += p;
    CHECK(sum_level == Approx(1.0).margin(1e-10));
    CHECK(sum_photon == Approx(1.0).margin(1e-10));
    CHECK(r.x_var > 0.0);
    CHECK(r.p_var > 0.0);
    CHECK(r.x_var * r.p_var - r.xp_cov * r.xp_cov >= 0.25 - 1e-9);
    CHECK(r.norm_error < 1e-12);

    // a state with large norm drift is a hard error, not silently fixed
    StateVector bad(2, 4);
    bad.at(1, 0) = 1.1;
    CHECK_THROWS_AS(observe(bad), NormDriftExceeded);
}

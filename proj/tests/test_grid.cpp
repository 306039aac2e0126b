#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ellsys/errors.hpp"
#include "ellsys/grid.hpp"
#include "ellsys/rng.hpp"
#include "support.hpp"

using namespace ellsys;
using std::numbers::pi;

namespace {

GridFunction random_field(const PeriodicGrid& g, int C, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    GridFunction u(g, C);
    for (auto& v : u.values()) v = rng.normal();
    return u;
}

}  // namespace

TEST(Grid, IndexingRoundTrip) {
    const PeriodicGrid g(3, 6, 2.0);
    EXPECT_EQ(g.size(), 216u);
    EXPECT_DOUBLE_EQ(g.spacing(), 2.0 / 6);
    EXPECT_DOUBLE_EQ(g.cell_weight(), std::pow(2.0 / 6, 3));
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto idx = g.multi_index(k);
        EXPECT_EQ(g.flat_index(std::span<const int>(idx.data(), 3)), k);
        const std::size_t m = g.negated_index(k);
        const auto nidx = g.multi_index(m);
        for (int d = 0; d < 3; ++d) {
            const int a = g.signed_frequency(idx[d]), b = g.signed_frequency(nidx[d]);
            if (a == -3) EXPECT_EQ(b, -3);  // Nyquist maps to itself
            else EXPECT_EQ(a, -b);
        }
    }
    // axis 0 slowest
    EXPECT_EQ(g.multi_index(1)[2], 1);
    EXPECT_EQ(g.multi_index(36)[0], 1);
    EXPECT_DOUBLE_EQ(g.point(36)(0), 2.0 / 6);
    EXPECT_DOUBLE_EQ(g.frequency(g.size() - 1)(0), -1.0 / 2.0);
    EXPECT_TRUE(g.on_nyquist(3));
    EXPECT_FALSE(g.on_nyquist(2));
}

TEST(Grid, RejectsBadParameters) {
    EXPECT_THROW(PeriodicGrid(1, 8), DimensionError);
    EXPECT_THROW(PeriodicGrid(5, 8), DimensionError);
    EXPECT_THROW(PeriodicGrid(2, 7), DimensionError);
    EXPECT_THROW(PeriodicGrid(2, 2), DimensionError);
    EXPECT_THROW(PeriodicGrid(2, 8, 0.0), InputError);
    EXPECT_THROW(GridFunction(PeriodicGrid(2, 4), 1, std::vector<double>(15)), DimensionError);
}

TEST(Dft, MatchesNaiveSum) {
    for (auto [n, G] : {std::pair{2, 8}, std::pair{3, 4}, std::pair{2, 6}}) {
        const PeriodicGrid g(n, G, 1.7);
        const GridFunction u = random_field(g, 2, 40 + G);
        const SpectralField U = dft_forward(u);
        for (int c = 0; c < 2; ++c) {
            const auto comp = u.component(c);
            const auto ref = support::naive_dft({comp.begin(), comp.end()}, n, G);
            for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LT(std::abs(U.at(c, k) - ref[k]), 1e-13);
        }
        EXPECT_LT(U.hermitian_defect(), 1e-14);
        const GridFunction back = dft_inverse(U);
        for (std::size_t i = 0; i < u.values().size(); ++i) EXPECT_NEAR(back.values()[i], u.values()[i], 1e-13);
    }
}

TEST(Dft, SineCoefficients) {
    // sin(2 pi x_1) = (e^{2 pi i x_1} - e^{-2 pi i x_1}) / 2i
    const PeriodicGrid g(2, 8);
    const GridFunction u = sample_field(g, 1, [](const Vector& x, std::span<double> out) { out[0] = std::sin(2 * pi * x(0)); });
    const SpectralField U = dft_forward(u);
    const int plus[2] = {1, 0}, minus[2] = {7, 0};
    const std::size_t kp = g.flat_index(plus), km = g.flat_index(minus);
    EXPECT_LT(std::abs(U.at(0, kp) - std::complex<double>(0, -0.5)), 1e-15);
    EXPECT_LT(std::abs(U.at(0, km) - std::complex<double>(0, 0.5)), 1e-15);
    double rest = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (k != kp && k != km) rest += std::abs(U.at(0, k));
    EXPECT_LT(rest, 1e-13);
}

TEST(Dft, Plancherel) {
    for (double L : {1.0, 2.5}) {
        const PeriodicGrid g(3, 8, L);
        const GridFunction u = random_field(g, 3, 9);
        const SpectralField U = dft_forward(u);
        double energy = 0.0;
        for (auto c : U.coefficients()) energy += std::norm(c);
        EXPECT_NEAR(norm_l2(u) * norm_l2(u), std::pow(L, 3) * energy, 1e-10 * energy * std::pow(L, 3));
        EXPECT_NEAR(spectral_norm_l2(U), norm_l2(u), 1e-12 * norm_l2(u));
    }
}

TEST(Gradient, ExactOnTrigonometricPolynomials) {
    const double L = 2.0;
    const PeriodicGrid g(3, 16, L);
    const double w = 2 * pi / L;
    const GridFunction u = sample_field(g, 2, [&](const Vector& x, std::span<double> out) {
        out[0] = std::sin(w * x(0)) * std::cos(2 * w * x(2));
        out[1] = std::cos(3 * w * x(1));
    });
    const GridFunction Du = gradient(u);
    ASSERT_EQ(Du.components(), 6);
    double err = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Vector x = g.point(p);
        const double want[6] = {w * std::cos(w * x(0)) * std::cos(2 * w * x(2)), 0.0,
                                -2 * w * std::sin(w * x(0)) * std::sin(2 * w * x(2)), 0.0,
                                -3 * w * std::sin(3 * w * x(1)), 0.0};
        for (int c = 0; c < 6; ++c) err = std::max(err, std::abs(Du.at(c, p) - want[c]));
    }
    EXPECT_LT(err, 1e-11);
}

TEST(Gradient, CenteredDifferencesConvergeAtSecondOrder) {
    // For a smooth band-limited field the spectral gradient is exact, so the gap to centered
    // differences is the O(h^2) truncation error: halving h should cut it by about 4.
    auto gap = [](int G) {
        const PeriodicGrid g(2, G);
        const GridFunction u = sample_field(g, 1, [](const Vector& x, std::span<double> out) {
            out[0] = std::sin(2 * pi * x(0)) + 0.5 * std::cos(4 * pi * x(1) + 0.3);
        });
        const GridFunction Du = gradient(u);
        const double h = g.spacing();
        double err = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p) {
            auto idx = g.multi_index(p);
            for (int j = 0; j < 2; ++j) {
                auto fw = idx, bw = idx;
                fw[j] = (idx[j] + 1) % G;
                bw[j] = (idx[j] + G - 1) % G;
                const double fd = (u.at(0, g.flat_index(std::span<const int>(fw.data(), 2))) -
                                   u.at(0, g.flat_index(std::span<const int>(bw.data(), 2)))) / (2 * h);
                err = std::max(err, std::abs(fd - Du.at(j, p)));
            }
        }
        return err;
    };
    const double e16 = gap(16), e32 = gap(32), e64 = gap(64);
    EXPECT_NEAR(e16 / e32, 4.0, 0.8);
    EXPECT_NEAR(e32 / e64, 4.0, 0.8);
}

TEST(Gradient, NyquistModeIsDropped) {
    const PeriodicGrid g(2, 8);
    const GridFunction u = sample_field(g, 1, [](const Vector& x, std::span<double> out) { out[0] = std::cos(8 * pi * x(0)); });
    EXPECT_LT(norm_linf(gradient(u)), 1e-12);
    SpectralField U = dft_forward(u);
    EXPECT_NEAR(remove_nyquist(U), 1.0, 1e-12);  // the samples are (-1)^i, all energy on the Nyquist plane
    EXPECT_LT(spectral_norm_l2(U), 1e-12);
}

TEST(Norms, ConstantsAndExponents) {
    const PeriodicGrid g(3, 4, 2.0);
    GridFunction u(g, 2);
    for (std::size_t p = 0; p < g.size(); ++p) {
        u.at(0, p) = 3.0;
        u.at(1, p) = 4.0;
    }
    // |u| = 5 on a cell of volume 8
    EXPECT_NEAR(norm_l2(u), 5.0 * std::sqrt(8.0), 1e-12);
    EXPECT_NEAR(norm_lp(u, 1.0), 40.0, 1e-12);
    EXPECT_NEAR(norm_linf(u), 5.0, 1e-15);
    EXPECT_DOUBLE_EQ(conjugate_exponent(3), 6.0);
    EXPECT_DOUBLE_EQ(conjugate_exponent(4), 4.0);
    EXPECT_NEAR(norm_l2star(u), 5.0 * std::pow(8.0, 1.0 / 6.0), 1e-12);
    EXPECT_THROW(conjugate_exponent(2), UnsupportedExponentError);
    EXPECT_THROW(norm_l2star(GridFunction(PeriodicGrid(2, 4), 1)), UnsupportedExponentError);
    EXPECT_THROW(norm_lp(u, 0.5), DomainError);
}

TEST(Norms, MeanProjection) {
    const PeriodicGrid g(2, 8);
    GridFunction u = random_field(g, 2, 3);
    for (std::size_t p = 0; p < g.size(); ++p) u.at(1, p) += 2.0;
    const MeanProjection m = project_mean_zero(u);
    double s0 = 0, s1 = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        s0 += m.field.at(0, p);
        s1 += m.field.at(1, p);
    }
    EXPECT_NEAR(s0, 0.0, 1e-12);
    EXPECT_NEAR(s1, 0.0, 1e-12);
    EXPECT_GT(m.dropped_mean(1), 1.5);
}

TEST(Sampling, RandomBandLimitedFields) {
    const PeriodicGrid g(3, 8);
    const GridFunction a = random_band_limited(g, 2, 2, 5);
    const GridFunction b = random_band_limited(g, 2, 2, 5);
    for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
    const SpectralField A = dft_forward(a);
    for (int c = 0; c < 2; ++c) {
        EXPECT_LT(std::abs(A.at(c, 0)), 1e-14);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const auto idx = g.multi_index(k);
            int top = 0;
            for (int d = 0; d < 3; ++d) top = std::max(top, std::abs(g.signed_frequency(idx[d])));
            if (top > 2) EXPECT_LT(std::abs(A.at(c, k)), 1e-13);
        }
    }
    EXPECT_GT(norm_l2(a), 0.1);
    EXPECT_THROW(random_band_limited(g, 1, 4, 0), DomainError);
}

TEST(GridFunction, Arithmetic) {
    const PeriodicGrid g(2, 4);
    const GridFunction a = random_field(g, 1, 1), b = random_field(g, 1, 2);
    const GridFunction c = 2.0 * a + b - a;
    for (std::size_t i = 0; i < c.values().size(); ++i) EXPECT_NEAR(c.values()[i], a.values()[i] + b.values()[i], 1e-15);
    EXPECT_THROW(a + GridFunction(g, 2), DimensionError);
}

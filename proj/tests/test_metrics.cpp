#include <doctest.h>

#include <cmath>
#include <vector>

#include "catex/errors.hpp"
#include "catex/metrics.hpp"

using namespace catex;

namespace {

Matrix make(std::size_t r, std::size_t c, std::initializer_list<double> vals) {
    Matrix m(r, c);
    std::size_t i = 0;
    for (double v : vals) m.data[i++] = v;
    return m;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("mse and rmse on hand-computed values") {
    Matrix truth = make(2, 2, {1.0, 2.0, 3.0, 4.0});
    Matrix pred = make(2, 2, {1.5, 2.0, 3.0, 2.0});
    // squared residuals: 0.25, 0, 0, 4 -> pooled mean 4.25 / 4
    CHECK(mse(truth, pred) == doctest::Approx(1.0625).epsilon(1e-15));
    CHECK(rmse(truth, pred) == doctest::Approx(std::sqrt(1.0625)).epsilon(1e-15));
    CHECK(mse(truth, truth) == 0.0);
}

TEST_CASE("r2 of perfect, mean and offset predictors") {
    Matrix truth = make(4, 1, {1.0, 2.0, 3.0, 4.0});
    CHECK(r2(truth, truth) == doctest::Approx(1.0).epsilon(1e-15));

    Matrix mean_pred = make(4, 1, {2.5, 2.5, 2.5, 2.5});
    CHECK(r2(truth, mean_pred) == doctest::Approx(0.0).epsilon(1e-15));

    // SS_res = 4 * 0.25 = 1, SS_tot = 5 -> r2 = 0.8
    Matrix off = make(4, 1, {1.5, 2.5, 3.5, 4.5});
    CHECK(r2(truth, off) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("pooled r2 uses per-target means") {
    // second column constant in truth: its SS_tot contribution is 0, but the
    // pool still works because column one varies
    Matrix truth = make(3, 2, {1.0, 5.0, 2.0, 5.0, 3.0, 5.0});
    Matrix pred = make(3, 2, {1.0, 5.0, 2.0, 5.0, 3.0, 5.0});
    CHECK(r2(truth, pred) == doctest::Approx(1.0).epsilon(1e-15));

    Matrix all_const = make(3, 2, {5.0, 5.0, 5.0, 5.0, 5.0, 5.0});
    CHECK_THROWS_AS(r2(all_const, pred), DegenerateTruth);
}

TEST_CASE("shape and size errors") {
    Matrix a = make(2, 2, {1, 2, 3, 4});
    Matrix b = make(2, 1, {1, 2});
    CHECK_THROWS_AS(mse(a, b), LengthMismatch);
    CHECK_THROWS_AS(mse(Matrix{}, Matrix{}), LengthMismatch);
    Matrix one = make(1, 1, {1.0});
    CHECK_THROWS_AS(r2(one, one), LengthMismatch);  // needs >= 2 samples
}

TEST_CASE("error report is self-consistent") {
    Matrix truth = make(3, 2, {1, 10, 2, 20, 3, 30});
    Matrix pred = make(3, 2, {1, 11, 2, 19, 4, 30});
    ErrorReport rep = error_report(truth, pred);
    REQUIRE(rep.mse_per_target.size() == 2);
    CHECK(rep.n_samples == 3);
    CHECK(rep.mse_per_target[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(rep.mse_per_target[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(rep.mse ==
          doctest::Approx(0.5 * (rep.mse_per_target[0] + rep.mse_per_target[1])).epsilon(1e-14));
    CHECK(rep.rmse == doctest::Approx(std::sqrt(rep.mse)).epsilon(1e-14));
    CHECK(rep.rmse_per_target[0] ==
          doctest::Approx(std::sqrt(rep.mse_per_target[0])).epsilon(1e-14));
    CHECK(rep.r2 == doctest::Approx(r2(truth, pred)).epsilon(1e-14));
}

TEST_CASE("rollout error averages per-step snapshot rmse") {
    std::vector<Matrix> ref{make(2, 3, {0, 0, 0, 0, 0, 0}),
                            make(2, 3, {1, 1, 1, 1, 1, 1})};
    std::vector<Matrix> same = ref;
    CHECK(rollout_error(ref, same) == 0.0);

    // step 1 identical, step 2 off by 2 everywhere -> rmse 0 then 2, mean 1
    std::vector<Matrix> off{ref[0], make(2, 3, {3, 3, 3, 3, 3, 3})};
    CHECK(rollout_error(ref, off) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("outflow-only restricts to the outlet cell") {
    // only the first cell differs: full error sees it, outflow error does not
    std::vector<Matrix> ref{make(2, 3, {0, 0, 0, 5, 5, 5})};
    std::vector<Matrix> test{make(2, 3, {2, 2, 2, 5, 5, 5})};
    CHECK(rollout_error(ref, test) > 0.0);
    CHECK(rollout_error(ref, test, true) == 0.0);

    // and only the last cell differing flips the relation
    std::vector<Matrix> test2{make(2, 3, {0, 0, 0, 6, 5, 5})};
    CHECK(rollout_error(ref, test2, true) > 0.0);
}

TEST_CASE("rollout grid mismatches throw") {
    std::vector<Matrix> a{make(2, 3, {0, 0, 0, 0, 0, 0})};
    std::vector<Matrix> b{make(2, 3, {0, 0, 0, 0, 0, 0}), make(2, 3, {0, 0, 0, 0, 0, 0})};
    CHECK_THROWS_AS(rollout_error(a, b), GridMismatch);
    std::vector<Matrix> c{make(1, 3, {0, 0, 0})};
    CHECK_THROWS_AS(rollout_error(a, c), GridMismatch);
    std::vector<Matrix> empty;
    CHECK_THROWS_AS(rollout_error(empty, empty), GridMismatch);
}

}  // TEST_SUITE

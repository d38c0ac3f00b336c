#include <doctest.h>

#include <random>

#include "mgt/kernels.hpp"
#include "test_support.hpp"

using namespace mgt;
using namespace mgt::kernels;

namespace {

CsrMatrix random_csr(std::mt19937_64& rng, int rows, int cols, int per_row) {
    std::uniform_int_distribution<int> pick(0, cols - 1);
    std::normal_distribution<double> nd;
    CsrMatrix a;
    a.rows = rows;
    a.cols = cols;
    a.row_ptr.push_back(0);
    for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < per_row; ++k) {
            a.col.push_back(pick(rng));
            a.val.push_back(nd(rng));
        }
        a.row_ptr.push_back(static_cast<int>(a.col.size()));
    }
    return a;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 500 + 137 * trial;
        const auto a = random_csr(rng, n, n, 7);
        const auto x = test::random_vector(rng, n);
        const auto w = test::random_vector(rng, n);
        std::vector<double> ys(n), yp(n);
        spmv_serial(a, x.data(), ys.data());
        spmv_parallel(a, x.data(), yp.data());
        for (int i = 0; i < n; ++i) CHECK(ys[i] == yp[i]);

        CHECK(test::rel_diff(dot_serial(x.data(), w.data(), n), dot_parallel(x.data(), w.data(), n)) < 1e-12);

        std::vector<double> ls(n), lp(n);
        laplacian_serial(x.data(), ls.data(), n, 0.01);
        laplacian_parallel(x.data(), lp.data(), n, 0.01);
        for (int i = 0; i < n; ++i) CHECK(ls[i] == lp[i]);

        std::vector<double> pos(n);
        for (int i = 0; i < n; ++i) pos[i] = std::abs(w[i]);
        CHECK(test::rel_diff(weighted_residual_serial(a, x.data(), w.data(), pos.data(), n),
                             weighted_residual_parallel(a, x.data(), w.data(), pos.data(), n)) < 1e-12);

        std::vector<double> s1 = w, s2 = w;
        axpy(0.3, x.data(), s1.data(), n, Exec::serial);
        axpy(0.3, x.data(), s2.data(), n, Exec::parallel);
        for (int i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);
    }
}

TEST_CASE("csr diagonal sums duplicate diagonal entries") {
    CsrMatrix a;
    a.rows = a.cols = 2;
    a.row_ptr = {0, 2, 3};
    a.col = {0, 0, 1};
    a.val = {1.0, 2.0, 5.0};
    const auto d = a.diagonal();
    CHECK(d[0] == 3.0);
    CHECK(d[1] == 5.0);
}

TEST_CASE("default execution policy is switchable") {
    const Exec before = default_exec();
    set_default_exec(Exec::serial);
    CHECK(default_exec() == Exec::serial);
    set_default_exec(before);
    CHECK(default_exec() == before);
}

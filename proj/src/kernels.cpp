#include "mgt/kernels.hpp"

#include <atomic>

namespace mgt::kernels {

namespace {
std::atomic<Exec> g_exec{Exec::parallel};
}

Exec default_exec() { return g_exec.load(); }
void set_default_exec(Exec exec) { g_exec.store(exec); }

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(rows, 0.0);
    for (int r = 0; r < rows; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (col[k] == r) d[r] += val[k];
    return d;
}

void spmv_serial(const CsrMatrix& a, const double* x, double* y) {
    for (int r = 0; r < a.rows; ++r) {
        double acc = 0.0;
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
        y[r] = acc;
    }
}

void spmv_parallel(const CsrMatrix& a, const double* x, double* y) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < a.rows; ++r) {
        double acc = 0.0;
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
        y[r] = acc;
    }
}

void spmv(const CsrMatrix& a, const double* x, double* y, Exec exec) {
    if (exec == Exec::parallel)
        spmv_parallel(a, x, y);
    else
        spmv_serial(a, x, y);
}

double dot_serial(const double* a, const double* b, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot_parallel(const double* a, const double* b, int n) {
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot(const double* a, const double* b, int n, Exec exec) {
    return exec == Exec::parallel ? dot_parallel(a, b, n) : dot_serial(a, b, n);
}

void axpy(double alpha, const double* x, double* y, int n, Exec exec) {
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
    } else {
        for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
    }
}

void laplacian_serial(const double* in, double* out, int n, double h) {
    const double inv_h2 = 1.0 / (h * h);
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for (int i = 1; i < n - 1; ++i) out[i] = (in[i - 1] - 2.0 * in[i] + in[i + 1]) * inv_h2;
}

void laplacian_parallel(const double* in, double* out, int n, double h) {
    const double inv_h2 = 1.0 / (h * h);
    out[0] = 0.0;
    out[n - 1] = 0.0;
#pragma omp parallel for schedule(static)
    for (int i = 1; i < n - 1; ++i) out[i] = (in[i - 1] - 2.0 * in[i] + in[i + 1]) * inv_h2;
}

double weighted_residual_serial(const CsrMatrix& a, const double* x, const double* b, const double* w, int rows) {
    double acc = 0.0;
    for (int r = 0; r < rows; ++r) {
        double ax = 0.0;
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) ax += a.val[k] * x[a.col[k]];
        const double d = ax - b[r];
        acc += w[r] * d * d;
    }
    return acc;
}

double weighted_residual_parallel(const CsrMatrix& a, const double* x, const double* b, const double* w, int rows) {
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (int r = 0; r < rows; ++r) {
        double ax = 0.0;
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) ax += a.val[k] * x[a.col[k]];
        const double d = ax - b[r];
        acc += w[r] * d * d;
    }
    return acc;
}

}  // namespace mgt::kernels

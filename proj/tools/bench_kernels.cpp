// Times the OpenMP kernels against the serial reference implementations and
// checks they agree. Run with OMP_NUM_THREADS to vary the thread count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spect/layers.hpp"
#include "spect/projector.hpp"
#include "spect/reference.hpp"
#include "spect/rng.hpp"

using namespace spect;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return scale > 0.0 ? d / scale : d;
}

void set_threads(int t) {
#ifdef _OPENMP
    omp_set_num_threads(t);
#else
    (void)t;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void report(const char* name, double serial_ms, double parallel_ms, double rel) {
    std::printf("%-22s %10.2f ms %10.2f ms %8.2fx   max rel diff vs ref %.2e\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, rel);
}

}  // namespace

int main() {
    const int threads = max_threads();
    std::printf("kernel benchmark, 1 thread vs %d threads\n", threads);
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    Pcg32 rng(7);

    {
        ScanGeometry g{96, 64, 144, 1.0, 2.0 * M_PI};
        Projector proj(g, Projector::Cache::Off);
        Image img(g.n);
        for (double& v : img.data) v = rng.uniform();
        Sinogram out(g.np, g.nr);
        auto angles = proj.all_angles();

        set_threads(1);
        double t_serial = time_best_of(3, [&] { proj.forward(img.data, out.data, angles); });
        set_threads(threads);
        double t_par = time_best_of(3, [&] { proj.forward(img.data, out.data, angles); });

        ScanGeometry small{24, 16, 36, 1.0, 2.0 * M_PI};
        Projector sproj(small, Projector::Cache::Off);
        Image simg(small.n);
        for (double& v : simg.data) v = rng.uniform();
        Sinogram got = sproj.forward_project(simg);
        Sinogram want = ref::forward_project(small, simg);
        report("forward_project", t_serial, t_par, max_rel_diff(want.data, got.data));
    }

    {
        ScanGeometry g{96, 64, 144, 1.0, 2.0 * M_PI};
        Projector proj(g, Projector::Cache::Off);
        Sinogram sino(g.np, g.nr);
        for (double& v : sino.data) v = rng.uniform();
        Image out(g.n);
        auto angles = proj.all_angles();

        set_threads(1);
        double t_serial = time_best_of(3, [&] { proj.back(sino.data, out.data, angles); });
        set_threads(threads);
        double t_par = time_best_of(3, [&] { proj.back(sino.data, out.data, angles); });

        ScanGeometry small{24, 16, 36, 1.0, 2.0 * M_PI};
        Projector sproj(small, Projector::Cache::Off);
        Sinogram ssino(small.np, small.nr);
        for (double& v : ssino.data) v = rng.uniform();
        Image got = sproj.back_project(ssino);
        Image want = ref::back_project(small, ssino);
        report("back_project", t_serial, t_par, max_rel_diff(want.data, got.data));
    }

    {
        Tensor in({8, 16, 32, 32});
        for (double& v : in.data) v = rng.uniform(-1.0, 1.0);
        Tensor w({16, 16, 3, 3});
        for (double& v : w.data) v = rng.uniform(-0.3, 0.3);
        std::vector<double> bias(16, 0.1);

        set_threads(1);
        double t_serial = time_best_of(3, [&] { conv2d_forward(in, w, bias, 1); });
        set_threads(threads);
        double t_par = time_best_of(3, [&] { conv2d_forward(in, w, bias, 1); });

        Tensor got = conv2d_forward(in, w, bias, 1);
        std::vector<double> want =
            ref::conv2d_forward(in.data, 8, 16, 32, 32, w.data, 16, 3, 1, bias);
        report("conv2d_forward", t_serial, t_par, max_rel_diff(want, got.data));
    }

    {
        Tensor in({8, 16, 32, 32});
        for (double& v : in.data) v = rng.uniform(-1.0, 1.0);
        Tensor w({16, 16, 3, 3});
        for (double& v : w.data) v = rng.uniform(-0.3, 0.3);
        Tensor gout({8, 16, 32, 32});
        for (double& v : gout.data) v = rng.uniform(-1.0, 1.0);

        set_threads(1);
        double t_serial = time_best_of(3, [&] { conv2d_backward(in, w, gout, 1); });
        set_threads(threads);
        double t_par = time_best_of(3, [&] { conv2d_backward(in, w, gout, 1); });
        report("conv2d_backward", t_serial, t_par, 0.0);
    }

    {
        Tensor in({32, 768});
        for (double& v : in.data) v = rng.uniform(-1.0, 1.0);
        Tensor w({512, 768});
        for (double& v : w.data) v = rng.uniform(-0.1, 0.1);
        std::vector<double> bias(512, 0.0);

        set_threads(1);
        double t_serial = time_best_of(5, [&] { dense_forward(in, w, bias); });
        set_threads(threads);
        double t_par = time_best_of(5, [&] { dense_forward(in, w, bias); });

        Tensor got = dense_forward(in, w, bias);
        std::vector<double> want = ref::dense_forward(in.data, 32, 768, w.data, 512, bias);
        report("dense_forward", t_serial, t_par, max_rel_diff(want, got.data));
    }

    return 0;
}

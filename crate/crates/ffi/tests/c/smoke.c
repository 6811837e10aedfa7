#include <math.h>
#include <stdio.h>

#include "steady.h"

int main(void) {
    SteadyLiouvillian *l = NULL;
    const char *names[] = {"kappa"};
    double values[] = {0.2};
    if (steady_liouvillian_build("jc", 4, names, values, 1, &l) != STEADY_STATUS_OK) {
        fprintf(stderr, "build: %s\n", steady_last_error());
        return 1;
    }

    SteadyOptions opts = steady_options_default();
    opts.ordering = STEADY_ORDERING_CMD;
    SteadyResult *r = NULL;
    if (steady_solve(l, STEADY_METHOD_BICGSTAB, &opts, &r) != STEADY_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", steady_last_error());
        return 1;
    }

    size_t d = steady_result_dim(r);
    double re[64], im[64];
    if (d != 8 || steady_result_rho(r, re, im, d * d) != STEADY_STATUS_OK) {
        return 1;
    }
    double trace = 0.0;
    for (size_t i = 0; i < d; i++) {
        trace += re[i * d + i];
    }
    SteadyDiagnostics diag;
    steady_result_diagnostics(r, &diag);
    printf("trace %.12f residual %.3e converged %d\n", trace, diag.residual, diag.converged);

    if (steady_solve(NULL, STEADY_METHOD_DIRECT, NULL, &r) != STEADY_STATUS_NULL_POINTER) {
        return 1;
    }
    steady_result_free(r);
    steady_liouvillian_free(l);
    return fabs(trace - 1.0) < 1e-10 && diag.converged ? 0 : 1;
}

/* Escape the 2-D saddle with classical momentum, then run ADINE
 * on a caller-supplied bowl.
 *
 *   cargo build -p adine-ffi --release
 *   cc saddle.c -I../../include -L../../../../target/release -ladine_ffi -lm -o saddle
 */
#include <stdio.h>

#include "adine.h"

static int bowl(void *user, const double *x, size_t n, double *f, double *grad) {
    (void)user;
    double s = 1.0;
    for (size_t i = 0; i < n; i++) {
        s += x[i] * x[i];
        if (grad) grad[i] = 2.0 * x[i];
    }
    *f = s;
    return 0;
}

static int fail(const char *what) {
    char msg[256];
    adine_last_error(msg, sizeof msg);
    fprintf(stderr, "%s: %s\n", what, msg);
    return 1;
}

int main(void) {
    AdineLandscape *saddle = NULL;
    AdineOptimizer *cm = NULL;
    if (adine_landscape_new_saddle2d(&saddle) != ADINE_STATUS_OK) return fail("landscape");
    if (adine_optimizer_new_cm(0.01, 1.1, &cm) != ADINE_STATUS_OK) return fail("optimizer");

    double theta[2];
    adine_landscape_default_start(saddle, theta, 2);
    double f = 0.0;
    AdineStepRecord rec;
    while (f >= -10.0) {
        if (adine_optimizer_step_landscape(cm, saddle, theta, 2, &rec) != ADINE_STATUS_OK) return fail("step");
        adine_landscape_eval(saddle, theta, 2, &f, NULL);
    }
    printf("CM m=1.1 reached f=%.3f after %llu steps\n", f, (unsigned long long)rec.t);
    adine_optimizer_free(cm);
    adine_landscape_free(saddle);

    AdineOptimizer *adine = NULL;
    if (adine_optimizer_new_adine(0.05, 0.9, 1.0001, 1.1, &adine) != ADINE_STATUS_OK) return fail("optimizer");
    double x[3] = {1.0, -2.0, 0.5};
    for (int i = 0; i < 100; i++) {
        if (adine_optimizer_step_callback(adine, bowl, NULL, x, 3, &rec) != ADINE_STATUS_OK) return fail("step");
    }
    printf("ADINE on a bowl: loss %.6f, momentum %.4f\n", rec.loss, rec.momentum);
    adine_optimizer_free(adine);
    return 0;
}

#include <math.h>
#include <stdio.h>

#include "cyclestab.h"

int main(void) {
    CsGains *g = NULL;
    if (cs_gains_optimal(3, &g) != CS_STATUS_OK) {
        return 1;
    }
    double mu = 0.0;
    if (cs_mu_star_hodograph(g, 10000, &mu) != CS_STATUS_OK || fabs(mu - 9.0) > 1e-6) {
        return 2;
    }

    CsTrajectory *t = NULL;
    if (cs_simulate_logistic(3.95, g, 0.3, NULL, 0, 20000, &t) != CS_STATUS_OK) {
        return 3;
    }
    size_t len = cs_trajectory_len(t);
    double last[1];
    size_t got = 0;
    if (cs_trajectory_states(t, last, 1, &got) != CS_STATUS_BUFFER_TOO_SMALL || got != len) {
        return 4;
    }
    cs_trajectory_free(t);

    if (cs_gains_optimal(0, &g) != CS_STATUS_INVALID_ARGUMENT) {
        return 5;
    }
    char msg[256];
    if (cs_last_error_message(msg, sizeof msg) == 0) {
        return 6;
    }
    printf("cyclestab %s: mu* = %.6f, %zu states\n", cs_version(), mu, len);
    return 0;
}

#include <stdio.h>
#include "paraboloid_float.h"

int main(void) {
    PfShape *shape = NULL;
    if (pf_shape_from_base_angle(74.33, &shape) != PF_STATUS_OK) {
        fprintf(stderr, "%s\n", pf_last_error_message());
        return 1;
    }
    PfEquilibria *list = NULL;
    if (pf_solve(shape, 0.51, NULL, &list) != PF_STATUS_OK) {
        fprintf(stderr, "%s\n", pf_last_error_message());
        pf_shape_free(shape);
        return 1;
    }
    size_t n = pf_equilibria_len(list), non_arch = 0;
    for (size_t i = 0; i < n; i++) {
        PfEquilibrium e;
        pf_equilibria_get(list, i, &e);
        if (e.case_kind == PF_CASE_NON_ARCHIMEDEAN) {
            non_arch++;
            printf("%.8f %.8f %.3f\n", e.x, e.b, e.tilt_deg);
        }
    }
    pf_equilibria_free(list);

    PfShape *bad = NULL;
    if (pf_shape_new(-1.0, &bad) != PF_STATUS_DOMAIN || pf_last_error_message() == NULL) {
        return 1;
    }
    pf_shape_free(shape);
    return non_arch == 5 ? 0 : 2;
}

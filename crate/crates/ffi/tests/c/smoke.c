#include <stdio.h>
#include <string.h>
#include "betafreq.h"

int main(void) {
    BfParams *p = NULL;
    if (bf_params_new(2, &p) != BF_STATUS_OK) return 1;
    char buf[16];
    size_t written = 0;
    if (bf_normalize(p, "011", buf, sizeof buf, &written) != BF_STATUS_OK) return 2;
    if (strcmp(buf, "100") != 0 || written != 4) return 3;
    double a = 0;
    if (bf_parry_alpha1(p, &a) != BF_STATUS_OK) return 4;
    if (bf_dimension(p, 9, 10, &a) != BF_STATUS_INFEASIBLE) return 5;
    if (bf_last_error() == NULL) return 6;
    bf_params_free(p);
    printf("ok %s\n", bf_version());
    return 0;
}

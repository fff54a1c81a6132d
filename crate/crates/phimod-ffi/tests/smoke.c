#include <stdio.h>
#include <string.h>
#include "phimod.h"

#define CHECK(x) do { if (!(x)) { fprintf(stderr, "failed: %s\n", #x); return 1; } } while (0)

int main(void) {
    PhimodHCombo *h = NULL;
    uint64_t v = 0;
    char *s = NULL;
    CHECK(phimod_expand_phi(3, 1, 5, &h) == PHIMOD_STATUS_OK);
    CHECK(phimod_hcombo_coeff(h, "297398301914493", &v) == PHIMOD_STATUS_OK && v == 0);
    phimod_hcombo_free(h);
    CHECK(phimod_expand_phi(3, 3, 5, &h) == PHIMOD_STATUS_OK);
    CHECK(phimod_hcombo_coeff(h, "297398301914493", &v) == PHIMOD_STATUS_OK && v == 3);
    phimod_hcombo_free(h);

    PhimodSolution *sol = NULL;
    CHECK(phimod_solve_builtin("kreweras", 0, 0, 1, &sol) == PHIMOD_STATUS_OK);
    CHECK(phimod_solution_coeff(sol, "13", 27, &v) == PHIMOD_STATUS_OK && v == 26);
    CHECK(phimod_solution_to_json(sol, &s) == PHIMOD_STATUS_OK && strstr(s, "\"p\"") != NULL);
    phimod_string_free(s);
    phimod_solution_free(sol);

    CHECK(phimod_solve_builtin("gessel_f1", 0, 0, 1, &sol) == PHIMOD_STATUS_LIFT_FAILED);
    char msg[256];
    CHECK(phimod_last_error_message(msg, sizeof msg) > 0);

    bool vanishes = false;
    CHECK(phimod_minpoly_verify("t^3 - t + z", 3, 1, &vanishes, NULL) == PHIMOD_STATUS_OK && vanishes);
    printf("ok\n");
    return 0;
}

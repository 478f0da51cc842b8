/* The public header compiles as C and a full run works from C. */
#include <stdio.h>

#include "fvpnet/fvpnet.h"

int main(void) {
  fvp_scenario* s = NULL;
  fvp_trajectory* t = NULL;
  double e0 = 0.0, eT = 0.0;
  if (fvp_scenario_example1(FVP_VARIANT_CUCKER, 3, 2000, &s) != FVP_OK) {
    fprintf(stderr, "example1: %s\n", fvp_last_error());
    return 1;
  }
  if (fvp_run(s, &t) != FVP_OK) {
    fprintf(stderr, "run: %s\n", fvp_last_error());
    fvp_scenario_free(s);
    return 1;
  }
  fvp_trajectory_error(t, 0, &e0);
  fvp_trajectory_error(t, fvp_trajectory_length(t) - 1, &eT);
  printf("e_0 = %g, e_T = %g\n", e0, eT);
  fvp_trajectory_free(t);
  fvp_scenario_free(s);
  return eT < e0 ? 0 : 1;
}

#include <stdio.h>
#include <stdlib.h>
#include "specfact.h"

#define CHECK(call)                                                         \
  do {                                                                      \
    SfStatus s_ = (call);                                                   \
    if (s_ != SF_STATUS_OK) {                                               \
      fprintf(stderr, "%s -> %d: %s\n", #call, s_, sf_last_error_message()); \
      return 1;                                                             \
    }                                                                       \
  } while (0)

int main(void) {
  SfPolyMatrix *density = NULL, *known = NULL, *factor = NULL;
  SfResult *result = NULL;
  SfParams params;
  double err = -1.0, check = -1.0;

  CHECK(sf_fixture("ieee0", &density, &known));
  CHECK(sf_params_default(&params));
  params.scalar_iters = 45;
  CHECK(sf_factorize(SF_ALGORITHM_JLE1, density, &params, &result));
  CHECK(sf_result_error(result, &err));
  CHECK(sf_result_factor(result, &factor));
  CHECK(sf_factorization_error(density, factor, &check));
  if (!(err <= 1e-6) || err != check) {
    fprintf(stderr, "err %g check %g\n", err, check);
    return 1;
  }
  sf_result_free(result);
  result = NULL;

  if (sf_factorize(SF_ALGORITHM_JLE3, density, NULL, &result) != SF_STATUS_SINGULAR_DELTA) {
    fprintf(stderr, "jle3 accepted a singular density\n");
    return 1;
  }
  printf("%s %.3e %s\n", sf_version(), err, sf_last_error_message());
  sf_poly_matrix_free(factor);
  sf_poly_matrix_free(known);
  sf_poly_matrix_free(density);
  return 0;
}

#include <stdio.h>
#include <string.h>
#include "pathguess.h"

#define CHECK(call)                                                            \
  do {                                                                         \
    PgStatus s_ = (call);                                                      \
    if (s_ != PG_STATUS_OK) {                                                  \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, pg_last_error());      \
      return 1;                                                                \
    }                                                                          \
  } while (0)

int main(void) {
  PgModel *model = NULL;
  PgSample *sample = NULL;
  PgGuessRule *rule = NULL;
  const char *json = "{\"family\": \"markov\", \"transitions\": [[0.9, 0.1], [0.2, 0.8]]}";

  CHECK(pg_model_from_json(json, &model));
  CHECK(pg_simulate(model, 2000, 7, &sample));

  int64_t data[] = {1};
  int64_t guess[] = {2};
  CHECK(pg_fit(sample, data, 1, guess, 1, &rule));

  uint32_t b = 1, out = 99;
  CHECK(pg_rule_guess(rule, &b, 1, &out, 1));
  double risk = -1.0;
  CHECK(pg_excess_risk(model, rule, &risk));

  if (pg_model_from_json("{\"family\": ", &model) != PG_STATUS_PARSE) return 2;
  if (strlen(pg_last_error()) == 0) return 3;

  printf("version=%s guess=%u risk=%g len=%zu\n", pg_version(), out, risk, pg_sample_len(sample));
  pg_rule_free(rule);
  pg_sample_free(sample);
  pg_model_free(model);
  return 0;
}

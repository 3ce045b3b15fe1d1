#include <stdio.h>
#include <string.h>

#include "cnfgame.h"

#define CHECK(cond)                                                       \
  do {                                                                    \
    if (!(cond)) {                                                        \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,      \
              cnfgame_last_error_message());                              \
      return 1;                                                           \
    }                                                                     \
  } while (0)

int main(void) {
  CnfgameInstance *inst = NULL;
  CHECK(cnfgame_instance_generate("fib-tt", 3, &inst) == CNFGAME_STATUS_OK);

  CnfgameInstanceInfo info;
  CHECK(cnfgame_instance_info(inst, &info) == CNFGAME_STATUS_OK);
  CHECK(info.universe_size == 5 && info.clause_count == 5);

  CnfgameSolveResult solved;
  CHECK(cnfgame_solve(inst, false, &solved) == CNFGAME_STATUS_OK);
  CHECK(solved.winner == CNFGAME_PLAYER_F);

  CnfgameReport *report = NULL;
  CHECK(cnfgame_play(inst, "optimal", "f-chase", NULL, &report) == CNFGAME_STATUS_OK);
  CnfgamePlayer winner;
  CHECK(cnfgame_report_winner(report, &winner) == CNFGAME_STATUS_OK);
  CHECK(winner == CNFGAME_PLAYER_F);
  CHECK(strstr(cnfgame_report_json(report), "\"winner\":\"F\"") != NULL);
  cnfgame_report_free(report);

  char *text = NULL;
  CHECK(cnfgame_instance_serialize(inst, &text) == CNFGAME_STATUS_OK);
  CHECK(strncmp(text, "p cnfgame 5 5 T T", 17) == 0);
  cnfgame_string_free(text);
  cnfgame_instance_free(inst);

  CnfgameInstance *bad = NULL;
  CHECK(cnfgame_instance_parse("p cnfgame 3 1 T F\n1 0\n", &bad) == CNFGAME_STATUS_PARSE);
  CHECK(bad == NULL);
  CHECK(strstr(cnfgame_last_error_message(), "line 1") != NULL);

  printf("ok %s\n", cnfgame_version());
  return 0;
}

#ifndef CNFGAME_H
#define CNFGAME_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum {
  CNFGAME_STATUS_OK = 0,
  CNFGAME_STATUS_NULL_POINTER = 1,
  CNFGAME_STATUS_INVALID_UTF8 = 2,
  CNFGAME_STATUS_PARSE = 3,
  CNFGAME_STATUS_INVALID_ARGUMENT = 4,
  CNFGAME_STATUS_LIMIT_EXCEEDED = 5,
  CNFGAME_STATUS_STRATEGY = 6,
  CNFGAME_STATUS_PANIC = 7,
} CnfgameStatus;

typedef enum {
  CNFGAME_PLAYER_T = 0,
  CNFGAME_PLAYER_F = 1,
} CnfgamePlayer;

/**
 * A parsed or generated game instance.
 */
typedef struct CnfgameInstance CnfgameInstance;

/**
 * The outcome of a played match.
 */
typedef struct CnfgameReport CnfgameReport;

typedef struct {
  uint32_t universe_size;
  uint64_t clause_count;
  CnfgamePlayer first;
  CnfgamePlayer last;
} CnfgameInstanceInfo;

typedef struct {
  CnfgamePlayer winner;
  /**
   * False only when every variable is already assigned.
   */
  bool has_principal_move;
  uint32_t principal_var;
  bool principal_value;
  uint64_t nodes_explored;
} CnfgameSolveResult;

/**
 * The library version as a static NUL-terminated string.
 */
const char *cnfgame_version(void);

/**
 * The message of the last failed call on this thread, or an empty string.
 * Valid until the next call into the library on the same thread.
 */
const char *cnfgame_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void cnfgame_string_free(char *s);

/**
 * Parses an instance file's text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
CnfgameStatus cnfgame_instance_parse(const char *text, CnfgameInstance **out);

/**
 * Builds a named construction (`xor-pairs`, `odd-tf` or `fib-tt`) of width `k`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
CnfgameStatus cnfgame_instance_generate(const char *name, uint32_t k, CnfgameInstance **out);

/**
 * Draws `m` distinct random `k`-clauses over `n` variables; `pattern` is one
 * of `TT`, `TF`, `FT`, `FF`.
 *
 * # Safety
 * `pattern` must be a NUL-terminated string; `out` must be writable.
 */
CnfgameStatus cnfgame_instance_random(uint32_t k,
                                      uint32_t m,
                                      uint32_t n,
                                      const char *pattern,
                                      uint64_t seed,
                                      CnfgameInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from this library, not yet freed.
 */
void cnfgame_instance_free(CnfgameInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
CnfgameStatus cnfgame_instance_info(const CnfgameInstance *inst, CnfgameInstanceInfo *out);

/**
 * Writes the instance in file format; free the result with `cnfgame_string_free`.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
CnfgameStatus cnfgame_instance_serialize(const CnfgameInstance *inst, char **out);

/**
 * Decides the winner under optimal play.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
CnfgameStatus cnfgame_solve(const CnfgameInstance *inst, bool parallel, CnfgameSolveResult *out);

/**
 * Plays the named strategies against each other. `audit` is a scheme name
 * (`sqrt2`, `parity`, `three-halves`) or null.
 *
 * # Safety
 * `inst` must be a live handle, the strings NUL-terminated (or null for
 * `audit`), and `out` writable.
 */
CnfgameStatus cnfgame_play(const CnfgameInstance *inst,
                           const char *t_strategy,
                           const char *f_strategy,
                           const char *audit,
                           CnfgameReport **out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
CnfgameStatus cnfgame_report_winner(const CnfgameReport *report, CnfgamePlayer *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
CnfgameStatus cnfgame_report_audit_failures(const CnfgameReport *report, uint64_t *out);

/**
 * The report as JSON, borrowed from the handle; null if `report` is null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
const char *cnfgame_report_json(const CnfgameReport *report);

/**
 * # Safety
 * `report` must be null or a handle from this library, not yet freed.
 */
void cnfgame_report_free(CnfgameReport *report);

/**
 * Checks a construction's shape and that its F strategy beats every T line.
 * `json_out` may be null; otherwise it receives the report, to be freed with
 * `cnfgame_string_free`.
 *
 * # Safety
 * `name` must be NUL-terminated; `passed` must be writable.
 */
CnfgameStatus cnfgame_verify(const char *name, uint32_t k, bool *passed, char **json_out);

/**
 * Runs T's potential strategy for `scheme` against exhaustive F on instances
 * with `clauses` clauses of width `k`. `json_out` as in `cnfgame_verify`.
 *
 * # Safety
 * The strings must be NUL-terminated; `passed` must be writable.
 */
CnfgameStatus cnfgame_sweep(uint32_t k,
                            const char *pattern,
                            const char *scheme,
                            uint32_t clauses,
                            uint64_t seeds,
                            bool *passed,
                            char **json_out);

#endif  /* CNFGAME_H */

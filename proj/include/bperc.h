/* C surface of the bootstrap-percolation workbench.
 *
 * Two kinds of entry point:
 *   - opaque bperc_config handles for holding infected-site configurations
 *     and running the closure dynamics on them;
 *   - bperc_run(op, request, response): every higher-level operation takes a
 *     JSON request and produces a JSON response. Supported ops: "sim", "pc",
 *     "event-prob", "bound", "g-table", "hier-build", "hier-check",
 *     "validate".
 *
 * All functions return a status code; on failure bperc_last_error() carries
 * a message for the calling thread. Strings returned through out-parameters
 * are owned by the caller and must be released with bperc_string_free.
 */
#ifndef BPERC_H
#define BPERC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    BPERC_OK = 0,
    BPERC_ERR_INVALID_ARGUMENT = 1,
    BPERC_ERR_PARSE = 2,
    BPERC_ERR_INTERNAL = 3
} bperc_status;

typedef struct bperc_config bperc_config;

/* Message describing the most recent failure on this thread; never NULL. */
const char* bperc_last_error(void);

void bperc_string_free(char* s);

/* Configurations: {"domain":[x_lo,x_hi,y_lo,y_hi],"infected":[[x,y],...]} */
bperc_status bperc_config_parse(const char* json, bperc_config** out);
void bperc_config_free(bperc_config* c);
bperc_status bperc_config_dump(const bperc_config* c, char** json_out);
bperc_status bperc_config_closure(const bperc_config* c, bperc_config** out);
bperc_status bperc_config_count(const bperc_config* c, long long* out);

bperc_status bperc_run(const char* op, const char* request_json, char** response_json);

#ifdef __cplusplus
}
#endif

#endif /* BPERC_H */

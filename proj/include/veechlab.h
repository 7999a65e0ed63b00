#ifndef VEECHLAB_H
#define VEECHLAB_H

/* C interface of the veechlab shared library.
 *
 * vl_run executes one named command against a JSON config string and hands
 * back a heap-allocated JSON result
 *   {"command", "config", "report", "artifacts": {filename: content}, "exit"}
 * in *out_json (release it with vl_free). The return value doubles as the
 * suggested process exit code: 0 pass, 1 assertion failure, 2 unusable
 * config, 3 truncation contamination blocked every measurement.
 */

#ifdef __cplusplus
extern "C" {
#endif

const char* vl_version(void);

/* NULL-terminated list of command names. */
const char* const* vl_commands(void);

int vl_run(const char* command, const char* config_json, char** out_json);

void vl_free(char* p);

#ifdef __cplusplus
}
#endif

#endif /* VEECHLAB_H */

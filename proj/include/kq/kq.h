#ifndef KQ_KQ_H
#define KQ_KQ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kq_status {
  KQ_OK = 0,
  KQ_ERR_VALIDATION = 1,
  KQ_ERR_DOMAIN = 2,
  KQ_ERR_SHAPE = 3,
  KQ_ERR_PARSE = 4,
  KQ_ERR_PRECONDITION = 5,
  KQ_ERR_GUARD = 6,
  KQ_ERR_INTERNAL = 7,
  KQ_ERR_NULL_ARG = 8
} kq_status;

typedef enum kq_verdict { KQ_PROVED = 0, KQ_REFUTED = 1, KQ_SAMPLED_PASS = 2 } kq_verdict;

typedef struct kq_module kq_module;

/* Strings handed out by the library are owned by the caller. */
void kq_string_free(char *s);
const char *kq_version(void);
const char *kq_status_name(kq_status status);
/* Message of the last failure on this thread; empty after success. */
const char *kq_last_error(void);

typedef struct kq_build_spec {
  const char *kind;  /* P, Q, R, theta-pre, theta-post, sl2p */
  const char *field; /* "rational" or a prime; NULL means rational */
  size_t d;
  size_t n;
  size_t t;
  uint64_t p;
  const char *poly; /* R only; when NULL, R uses n for the block at infinity */
} kq_build_spec;

kq_status kq_module_build(const kq_build_spec *spec, kq_module **out);
kq_status kq_module_parse(const char *text, kq_module **out);
kq_status kq_module_to_text(const kq_module *m, char **out);
kq_status kq_module_dims(const kq_module *m, size_t *d, size_t *dim1, size_t *dim2);
/* "rational" or the prime, as in module files. */
kq_status kq_module_field(const kq_module *m, char **tag);
void kq_module_free(kq_module *m);

/* eps as "p/q". pass is set to 1 when the verifier accepts. */
kq_status kq_witness(const kq_module *m, const char *eps, char **json, int *pass);
/* Staged fragmentation of the postinjective tree module; l_override 0 means none. */
kq_status kq_theta_fragment(size_t d, size_t t, const char *field, const char *eps, size_t l_override,
                            char **json, int *pass);
kq_status kq_best_epsilon(const kq_module *m, size_t l_eps, uint64_t budget, char **json);

kq_status kq_decompose(const kq_module *m, char **json);
kq_status kq_gamma(const kq_module *m, char **text);

kq_status kq_rep_dump(uint64_t p, char **text);
kq_status kq_sl2p_report(uint64_t p, size_t trials, uint64_t seed, char **json);

typedef struct kq_expander_options {
  const char *eta;   /* default 1/2 */
  const char *alpha; /* default 1 */
  int sampled;       /* 0 exhaustive, 1 random rational subspaces */
  size_t trials;
  long max_entry;
  uint64_t seed;
  uint64_t guard; /* 0 means the default */
  int reverse;
} kq_expander_options;

kq_status kq_expander_check(const kq_module *m, const kq_expander_options *opts, char **json, kq_verdict *verdict);
kq_status kq_expander_bounds(const char *alpha, char **json);

#ifdef __cplusplus
}
#endif

#endif

#ifndef MSPLAB_H
#define MSPLAB_H

/* C interface to the msplab core: Boolean target functions, MSP
 * classification, dimension lower bounds, experiment runs and self checks.
 * Strings returned through char** are heap-allocated; release them with
 * msplab_free. All functions return a status code unless noted otherwise. */

#ifdef __cplusplus
extern "C" {
#endif

enum {
  MSPLAB_OK = 0,
  MSPLAB_EINTERNAL = 1, /* unexpected failure, see msplab_last_error */
  MSPLAB_EINVAL = 2,    /* invalid config or arguments */
  MSPLAB_EDIVERGED = 3, /* dynamics diverged; partial traces were saved */
  MSPLAB_EVERIFY = 4    /* a verification check failed */
};

const char* msplab_version(void);

/* message for the last failing call on this thread ("" when none) */
const char* msplab_last_error(void);

void msplab_free(char* s);

/* ---- Boolean target functions (Fourier side) ---- */

typedef struct msplab_fourier msplab_fourier;

/* text format: "P=<n>" header then "S=<i,j,...> alpha=<value>" lines */
int msplab_fourier_parse(const char* text, msplab_fourier** out);
int msplab_fourier_format(const msplab_fourier* f, char** out);
int msplab_fourier_dim(const msplab_fourier* f);
/* value on the hypercube point whose +1 coordinates are the bits of mask */
double msplab_fourier_eval(const msplab_fourier* f, unsigned mask);
void msplab_fourier_release(msplab_fourier* f);

/* classification report, e.g. "MSP: yes, leap 1, ordering {1}<{1,2}" */
int msplab_msp_report(const msplab_fourier* f, char** out);
int msplab_msp_query(const msplab_fourier* f, int* is_msp, int* leap);

/* ---- dimension lower bounds ---- */

int msplab_polyk_bound(int d, int k, int m, double slack, double* out);
int msplab_staircase_bound(int d, int P, double slack, double* out);

/* ---- experiments ---- */

/* run the experiment described by config_text, writing its outputs under
 * out_dir; report receives the human summary and files (optional) the
 * newline-separated list of written paths */
int msplab_run(const char* config_text, const char* out_dir, char** report, char** files);

/* built-in preset catalogue */
int msplab_preset(const char* name, char** config_text);
int msplab_preset_names(char** names_csv);

/* rewrite config_text with [section] key = value set (section "" = preamble) */
int msplab_config_set(const char* config_text, const char* section, const char* key,
                      const char* value, char** out);

/* read a key's first value; *out is set to NULL when the key is absent */
int msplab_config_get(const char* config_text, const char* section, const char* key, char** out);

/* ---- self checks ----  level 0 = quick, 1 = full */
int msplab_verify(int level, char** report);

#ifdef __cplusplus
}
#endif

#endif /* MSPLAB_H */

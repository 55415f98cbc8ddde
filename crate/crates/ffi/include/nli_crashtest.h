#ifndef NLI_CRASHTEST_H
#define NLI_CRASHTEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum NctStatus {
  NCT_STATUS_OK = 0,
  /**
   * Bad configuration, unknown names, unreadable files.
   */
  NCT_STATUS_USAGE = 1,
  /**
   * Malformed or inconsistent data.
   */
  NCT_STATUS_VALIDATION = 2,
  /**
   * A bug; the library caught a panic.
   */
  NCT_STATUS_INTERNAL = 4,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  NCT_STATUS_INVALID_ARGUMENT = 5,
} NctStatus;

typedef enum NctVerdict {
  NCT_VERDICT_ROBUST = 0,
  NCT_VERDICT_INCONCLUSIVE = 1,
  NCT_VERDICT_ARTEFACT_PRONE = 2,
} NctVerdict;

/**
 * An NLI dataset.
 */
typedef struct NctDataset NctDataset;

/**
 * A trained artefact probe.
 */
typedef struct NctProbe NctProbe;

/**
 * A part-of-speech tagger model.
 */
typedef struct NctTagger NctTagger;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *nct_last_error(void);

/**
 * Library version as a static string.
 */
const char *nct_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void nct_string_free(char *s);

/**
 * Loads a JSONL or TSV dataset; the format follows the file extension.
 */
enum NctStatus nct_dataset_load(const char *path, struct NctDataset **out);

/**
 * Builds a dataset from JSONL text.
 */
enum NctStatus nct_dataset_from_jsonl(const char *name, const char *jsonl, struct NctDataset **out);

enum NctStatus nct_dataset_save(const struct NctDataset *dataset, const char *path);

/**
 * Serializes the dataset as JSONL into a new string.
 */
enum NctStatus nct_dataset_to_jsonl(const struct NctDataset *dataset, char **out);

/**
 * Number of pairs; 0 for a null handle.
 */
size_t nct_dataset_len(const struct NctDataset *dataset);

void nct_dataset_free(struct NctDataset *dataset);

/**
 * The model trained on the bundled corpus (seed 1, 5 epochs).
 */
enum NctStatus nct_tagger_bundled(struct NctTagger **out);

enum NctStatus nct_tagger_load(const char *path, struct NctTagger **out);

/**
 * Trains on a vertical `form TAG` file with universal tags.
 */
enum NctStatus nct_tagger_train(const char *corpus_path,
                                uint32_t epochs,
                                uint64_t seed,
                                struct NctTagger **out);

enum NctStatus nct_tagger_save(const struct NctTagger *tagger, const char *path);

/**
 * Tokenizes and tags `text`; writes `[["form","TAG"],...]` JSON to `out`.
 */
enum NctStatus nct_tagger_tag(const struct NctTagger *tagger, const char *text, char **out);

void nct_tagger_free(struct NctTagger *tagger);

/**
 * Applies a transform described as JSON, e.g.
 * `{"kind":"drop","tags":["NOUN"],"seed":13,"apply_to":"both"}`.
 * `tagger` may be null for transforms that need no tags. `report_json` may
 * be null; otherwise it receives the removal report.
 */
enum NctStatus nct_corrupt(const struct NctDataset *dataset,
                           const char *spec_json,
                           const struct NctTagger *tagger,
                           struct NctDataset **out,
                           char **report_json);

/**
 * Share of hypothesis word types found in the premise, in `[0, 1]`.
 */
enum NctStatus nct_lexical_overlap(const char *premise, const char *hypothesis, double *out);

/**
 * `featurizer` is `hyp_bow`, `pair_overlap` or `hyp_bow+pair_overlap`.
 */
enum NctStatus nct_probe_train(const struct NctDataset *dataset,
                               const char *featurizer,
                               uint32_t epochs,
                               uint64_t seed,
                               struct NctProbe **out);

/**
 * Writes `{"result":{...},"confusion":[[...]]}` JSON to `out`.
 */
enum NctStatus nct_probe_eval(const struct NctProbe *probe,
                              const struct NctDataset *dataset,
                              char **out);

enum NctStatus nct_probe_save(const struct NctProbe *probe, const char *path);

enum NctStatus nct_probe_load(const char *path, struct NctProbe **out);

void nct_probe_free(struct NctProbe *probe);

/**
 * Runs the diagnostic suite from a JSON config and renders the report in
 * `format` (`json`, `markdown`, `csv` or `overlap-csv`). `tagger` may be
 * null, in which case word-class transforms use the bundled model.
 * `verdict` may be null.
 */
enum NctStatus nct_run_suite(const struct NctDataset *dataset,
                             const char *config_json,
                             const struct NctTagger *tagger,
                             const char *format,
                             char **out,
                             enum NctVerdict *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLI_CRASHTEST_H */

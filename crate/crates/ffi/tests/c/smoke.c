#include <stdio.h>
#include <string.h>
#include "nli_crashtest.h"

#define CHECK(call)                                                     \
    do {                                                                \
        NctStatus st_ = (call);                                         \
        if (st_ != NCT_STATUS_OK) {                                     \
            fprintf(stderr, "%s -> %d: %s\n", #call, st_, nct_last_error()); \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    const char *jsonl =
        "{\"uid\":\"a\",\"premise\":\"The cat sat on the mat.\",\"hypothesis\":\"A cat sat.\",\"label\":\"entailment\"}\n"
        "{\"uid\":\"b\",\"premise\":\"Two dogs ran home.\",\"hypothesis\":\"No dogs ran.\",\"label\":\"contradiction\"}\n";
    NctDataset *ds = NULL;
    NctDataset *out = NULL;
    NctTagger *tagger = NULL;
    char *report = NULL;
    char *tags = NULL;
    double overlap = 0.0;

    CHECK(nct_dataset_from_jsonl("smoke", jsonl, &ds));
    if (nct_dataset_len(ds) != 2) return 2;
    CHECK(nct_tagger_bundled(&tagger));
    CHECK(nct_tagger_tag(tagger, "The cat sat.", &tags));
    printf("%s\n", tags);
    CHECK(nct_corrupt(ds, "{\"kind\":\"drop\",\"tags\":[\"NOUN\"]}", tagger, &out, &report));
    printf("%s\n", report);
    CHECK(nct_lexical_overlap("The cat sat.", "A cat sat.", &overlap));
    printf("%.4f\n", overlap);

    if (nct_corrupt(ds, "{\"kind\":\"drop\",\"tags\":[\"NOUNS\"]}", tagger, &out, NULL) != NCT_STATUS_USAGE)
        return 3;
    if (strlen(nct_last_error()) == 0) return 4;
    if (nct_dataset_load(NULL, &out) != NCT_STATUS_INVALID_ARGUMENT) return 5;

    nct_string_free(tags);
    nct_string_free(report);
    nct_dataset_free(out);
    nct_dataset_free(ds);
    nct_tagger_free(tagger);
    return 0;
}

/* Loads an instance and a routing code, then prints the feasibility report. */
#include <stdio.h>
#include "edgerem.h"

static const char *INSTANCE =
    "{\"vertices\":[\"s\",\"t\"],\"edges\":[{\"a\":\"s\",\"b\":\"t\",\"cap\":\"1\"}],"
    "\"sources\":[\"s\"],\"terminals\":[\"t\"],\"demand\":[[1]]}";

static const char *CODE =
    "{\"form\":\"routing\",\"n\":1,\"N\":1,\"message_sizes\":[2],"
    "\"routes\":[{\"source\":0,\"terminal\":0,\"path\":[\"s\",\"t\"],\"start\":1}]}";

int main(void) {
    EdgeremInstance *inst = NULL;
    EdgeremCode *code = NULL;
    char *report = NULL;
    EdgeremStatus st = edgerem_instance_from_json(INSTANCE, &inst);
    if (st == EDGEREM_STATUS_OK)
        st = edgerem_code_load(inst, CODE, &code);
    if (st == EDGEREM_STATUS_OK)
        st = edgerem_check(code, "0", "exhaustive", &report);
    if (report)
        printf("%s\n", report);
    else
        fprintf(stderr, "error: %s\n", edgerem_last_error());
    edgerem_string_free(report);
    edgerem_code_free(code);
    edgerem_instance_free(inst);
    return st == EDGEREM_STATUS_OK ? 0 : (int)st;
}

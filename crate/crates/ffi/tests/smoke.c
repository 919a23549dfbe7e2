#include <stdio.h>
#include <string.h>
#include "handy.h"

#define CHECK(c) do { if (!(c)) { fprintf(stderr, "failed: %s (%s)\n", #c, handy_last_error() ? handy_last_error() : ""); return 1; } } while (0)

int main(void) {
    HandyConfig *cfg = handy_config_new();
    CHECK(handy_config_apply(cfg, "nodes = 8\nsim_time = 200\n") == HANDY_STATUS_OK);
    CHECK(handy_config_set(cfg, "cache_size", "many") == HANDY_STATUS_INVALID_CONFIG);
    CHECK(strstr(handy_last_error(), "cache_size") != NULL);

    HandyReport *rep = NULL;
    CHECK(handy_run(cfg, &rep) == HANDY_STATUS_OK);
    HandySummary s;
    CHECK(handy_report_summary(rep, &s) == HANDY_STATUS_OK);
    CHECK(s.local_hits + s.remote_hits + s.failures <= s.requests);
    CHECK(s.energy_total > 0.0);
    char *csv = NULL;
    CHECK(handy_report_csv(rep, false, &csv) == HANDY_STATUS_OK);
    printf("%s", csv);
    handy_string_free(csv);
    handy_report_free(rep);
    handy_config_free(cfg);

    HandyLog *log = handy_log_new(8, 30.0);
    handy_log_request(log, 1, 0.0);
    handy_log_request(log, 2, 1.0);
    HandyMining *m = NULL;
    CHECK(handy_mine(log, 1, &m) == HANDY_STATUS_OK);
    CHECK(handy_mining_itemsets(m) == 3);
    uint32_t pair[2] = {1, 2}, sup = 0;
    CHECK(handy_mining_support(m, pair, 2, &sup) == HANDY_STATUS_OK && sup == 1);
    handy_mining_free(m);
    handy_log_free(log);
    return 0;
}

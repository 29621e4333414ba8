#include <stdio.h>
#include <string.h>
#include "slglue.h"

int main(void) {
    SlgParams *p = slg_params_default();
    double x = 0.0;
    if (slg_predicted_exponent("epsL65_P", 0.5, 0.3, 2, &x) != SLG_STATUS_OK) return 1;
    if (x < 1.33 || x > 1.34) return 2;
    if (slg_params_set(p, "c2", 0.9) != SLG_STATUS_OK) return 3;
    if (slg_params_validate(p) != SLG_STATUS_CONFIG_INVALID) return 4;
    if (strstr(slg_last_error(), "c2") == NULL) return 5;
    slg_params_free(p);
    SlgConfig *cfg = NULL;
    if (slg_config_parse("suite = gluing", &cfg) != SLG_STATUS_OK) return 6;
    SlgReport *rep = NULL;
    if (slg_run_suite(cfg, &rep) != SLG_STATUS_OK) return 7;
    SlgCounts k;
    if (slg_report_counts(rep, &k) != SLG_STATUS_OK || k.failed != 0 || k.total != 2) return 8;
    slg_report_free(rep);
    slg_config_free(cfg);
    printf("ok\n");
    return 0;
}

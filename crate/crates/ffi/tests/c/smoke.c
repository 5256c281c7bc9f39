#include <stdio.h>
#include <string.h>
#include "pyrorisk.h"

int main(void) {
    if (strlen(pyro_version()) == 0) return 10;

    PyroFusionConfig cfg = pyro_fusion_default();
    uint8_t level = 0;
    if (pyro_fwi_to_danger(24.2837, &cfg, &level) != PYRO_STATUS_OK || level != 3) return 11;
    if (pyro_fuse_binary(level, 0.5, &cfg, &level) != PYRO_STATUS_OK || level != 2) return 12;

    PyroFwiState s = pyro_fwi_default_state();
    PyroWeather w = {2018, 4, 13, 17.0, 42.0, 25.0, 0.0};
    PyroFwiReport r;
    if (pyro_fwi_step(&s, &w, 46.81, &r) != PYRO_STATUS_OK) return 13;
    if (r.ffmc < 87.69 || r.ffmc > 87.70) return 14;

    uint8_t junk[8] = {0};
    PyroNetwork *net = NULL;
    if (pyro_network_load(junk, sizeof junk, 1, 1, 1, &net) != PYRO_STATUS_BAD_WEIGHTS) return 15;
    char msg[256];
    if (pyro_last_error(msg, sizeof msg, NULL) != PYRO_STATUS_OK) return 16;
    printf("%s | %s\n", pyro_version(), msg);
    return 0;
}

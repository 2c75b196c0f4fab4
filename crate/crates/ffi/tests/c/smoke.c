#include <math.h>
#include <stdio.h>

#include "photonmix.h"

#define CHECK(call)                                                          \
  do {                                                                       \
    PmStatus s_ = (call);                                                    \
    if (s_ != PM_STATUS_OK) {                                                \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, pm_last_error_message()); \
      return 1;                                                              \
    }                                                                        \
  } while (0)

int main(void) {
  PmMode *lo_mode = NULL, *photon = NULL;
  PmLoState *lo = NULL;
  PmMeasurement *meas = NULL;
  PmProfile *prof = NULL;
  PmPoint pts[32];
  double amps[32];
  PmPoint ref = {0.7, 0.0};
  PmNoise noise = {PM_NOISE_KIND_NONE, 0.0, 0};
  double anchor, truth, worst = 0.0;

  CHECK(pm_mode_new(0, 0, 1.0, 0.0, 0.0, &lo_mode));
  CHECK(pm_mode_new(1, 0, 1.0, 0.0, 0.0, &photon));
  CHECK(pm_lo_fock(1, &lo));
  for (int i = 0; i < 32; i++) {
    pts[i].x = -3.0 + 6.0 * i / 31.0;
    pts[i].y = 0.0;
  }
  CHECK(pm_synthesize_array(lo, lo_mode, photon, ref, pts, 32, noise, 1, false, &meas));
  CHECK(pm_mode_eval(photon, ref.x, ref.y, &anchor));
  CHECK(pm_reconstruct(meas, lo_mode, &anchor, &prof));
  CHECK(pm_profile_amplitudes(prof, amps, 32));
  for (int i = 0; i < 32; i++) {
    CHECK(pm_mode_eval(photon, pts[i].x, pts[i].y, &truth));
    if (fabs(amps[i] - truth) > worst) worst = fabs(amps[i] - truth);
  }
  if (pm_mode_new(0, 0, -1.0, 0.0, 0.0, &photon) != PM_STATUS_INVALID_PARAMETER) return 1;

  pm_profile_free(prof);
  pm_measurement_free(meas);
  pm_lo_free(lo);
  pm_mode_free(photon);
  pm_mode_free(lo_mode);
  printf("photonmix %s worst=%.3e\n", pm_version(), worst);
  return worst < 1e-6 ? 0 : 1;
}

#include "ecl/ladder.hpp"

#include <algorithm>

#include "ecl/error.hpp"

namespace ecl {

LadderRun run_liftoff_ladder(const LadderConfig& cfg) {
  if (cfg.liftoffs.empty())
    throw Error(ErrorKind::Validation, "ladder: at least one lift-off is required");
  std::vector<double> liftoffs = cfg.liftoffs;
  std::sort(liftoffs.begin(), liftoffs.end());

  LadderRun run;
  std::vector<SpectralFeatures> features;
  for (double l : liftoffs) {
    const DoddDeedsModel model(cfg.geometry.with_liftoff(l), cfg.forward);
    run.spectra.push_back(model.spectrum(cfg.plate, cfg.freqs_hz));
    features.push_back(extract_features(run.spectra.back(), cfg.features));
  }

  run.calibration = make_calibration(features.front(), cfg.geometry.with_liftoff(liftoffs.front()),
                                     cfg.plate.sigma, cfg.alpha0_convention, cfg.forward.mutual);
  for (std::size_t i = 0; i < liftoffs.size(); ++i) {
    run.rows.push_back({liftoffs[i], features[i], run_compensation(features[i], run.calibration)});
  }
  return run;
}

}  // namespace ecl

// vmbeam/metrics/metrics.hpp
//
// Copyright 2026 vmbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VMBEAM_METRICS_METRICS_HPP_
#define VMBEAM_METRICS_METRICS_HPP_

#include <vector>

namespace vmbeam::metrics {

// Scale-invariant SDR: project est onto ref, 10*log10(|as|^2/|as - est|^2),
// capped at +60 dB. Throws on zero-power reference or length mismatch.
double si_sdr(const std::vector<double>& est, const std::vector<double>& ref);

// Plain time-domain SNR (no scale projection), capped at +60 dB.
double snr_metric(const std::vector<double>& est, const std::vector<double>& ref);

// Short-time objective intelligibility, 2010 definition with clipping,
// evaluated natively at 16 kHz: 256-sample Hann frames zero-padded to a
// 512-point FFT, 15 one-third-octave bands from 150 Hz (all below the
// original 10 kHz band limit), 30-frame segments, 40 dB silence removal driven by
// the reference. Output clipped to [0, 1]. Needs >= 30 speech-active frames.
double stoi(const std::vector<double>& est, const std::vector<double>& ref,
            double fs = 16000.0);

}  // namespace vmbeam::metrics

#endif  // VMBEAM_METRICS_METRICS_HPP_

#pragma once

#include <string>

#include "specmpc/metrics.hpp"
#include "specmpc/runner.hpp"

namespace specmpc {

enum class TraceFormat { csv, jsonl };

/// Writes the scenario copy, all traces, spectra, the optional spectrogram
/// and metrics.json into dir (created if absent). Returns the metrics.
RunMetrics write_run_artifacts(const std::string& dir,
                               const RunArtifacts& artifacts,
                               TraceFormat format = TraceFormat::csv);

/// Rebuilds artifacts from a run directory written by write_run_artifacts
/// (scenario.json plus the trace files). Metrics and spectra can then be
/// recomputed without rerunning the simulation.
RunArtifacts read_run_artifacts(const std::string& dir);

void write_spectrum_csv(const std::string& path, const PowerSpectrum& spec);
void write_spectrogram_csv(const std::string& path, const Spectrogram& gram);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace specmpc

#pragma once

/// CSV ingestion for the command-line front end. Calendar date columns are
/// translated to integer indices here, quarterly columns are upsampled to a
/// monthly grid with a natural cubic spline, and every cell is validated with
/// errors that name the offending row and column. The engine below this
/// layer only ever sees contiguous integer-indexed series.

#include <optional>
#include <string>

#include "bubblelab/core/time_series.hpp"

namespace bubblelab::cli {

/// Translation between a file's YYYY-MM date column and integer indices:
/// index i corresponds to the base month advanced by i * month_step months.
struct DateMapping {
    int base_year = 0;
    int base_month = 1;  ///< 1..12
    int month_step = 1;  ///< months per index step (3 for quarterly files)

    /// The calendar month at an integer index, formatted "YYYY-MM".
    [[nodiscard]] std::string date_at(long index) const;
};

/// Reads a CSV whose first column is either "t" (integers, consecutive) or
/// "date" (YYYY-MM, consecutive rows exactly `month_step` months apart).
/// Dated files are reindexed to 0..n-1 and the translation is reported
/// through `mapping`; integer-indexed files leave `mapping` empty. Every
/// value cell must parse as a finite number; violations name the row and
/// column. Row numbers count data rows, the header being row 0.
[[nodiscard]] Frame ingest_frame(const std::string& path,
                                 std::optional<DateMapping>* mapping = nullptr,
                                 int month_step = 1);

/// ingest_frame plus column selection: an empty `column` picks the only
/// value column (a plain series file) and is an error when the file has
/// several; otherwise the named column is extracted.
[[nodiscard]] TimeSeries ingest_series(const std::string& path, const std::string& column = "",
                                       std::optional<DateMapping>* mapping = nullptr);

/// Upsamples a quarterly frame (t = consecutive quarter indices) to monthly.
/// Each column is interpolated by a natural cubic spline whose knots sit at
/// the quarter midpoints (monthly index 3t + 1), so the original values are
/// reproduced exactly there. The single month before the first knot and
/// after the last one extend the boundary tangent linearly, which under the
/// natural S'' = 0 condition is the spline's own continuation. The output
/// spans monthly indices [3*first_quarter, 3*last_quarter + 2]; at least two
/// rows are required.
[[nodiscard]] Frame upsample_quarterly(const Frame& quarterly);

/// Joins two frames on the intersection of their index ranges, keeping the
/// left frame's columns first. Duplicate column names and an empty
/// intersection are errors.
[[nodiscard]] Frame merge_frames(const Frame& left, const Frame& right);

}  // namespace bubblelab::cli

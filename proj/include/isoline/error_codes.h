#ifndef ISOLINE_ERROR_CODES_H
#define ISOLINE_ERROR_CODES_H

/* X-macro list shared by the C API status enum and the C++ ErrorCode enum.
 * Columns: name, numeric value, category (P = parse, R = processing,
 * I = io, U = usage). Values are part of the ABI; append only. */
#define ISOLINE_ERROR_CODES(X)              \
  X(LengthNotTileSized, 1, P)               \
  X(BadTileName, 2, P)                      \
  X(MissingHeaderKey, 3, P)                 \
  X(RowLengthMismatch, 4, P)                \
  X(NonNumericSample, 5, P)                 \
  X(PayloadSizeMismatch, 6, P)              \
  X(UnsupportedDepth, 7, P)                 \
  X(UnknownFormat, 8, P)                    \
  X(InvalidGeoref, 9, P)                    \
  X(MalformedVector, 10, P)                 \
  X(NotTileShaped, 20, R)                   \
  X(ValueOutOfInt16Range, 21, R)            \
  X(OutOfFootprint, 22, R)                  \
  X(FactorTooLarge, 23, R)                  \
  X(MosaicInconsistent, 24, R)              \
  X(GapBetweenTiles, 25, R)                 \
  X(StepMismatch, 26, R)                    \
  X(AllVoid, 27, R)                         \
  X(NonPositiveInterval, 28, R)             \
  X(InvalidLevels, 29, R)                   \
  X(VoidCorner, 30, R)                      \
  X(IndexOutOfGrid, 31, R)                  \
  X(ZeroLengthArc, 32, R)                   \
  X(NotConverged, 33, R)                    \
  X(ElevationMismatchAtJoin, 34, R)         \
  X(ZeroLines, 35, R)                       \
  X(EqualElevations, 36, R)                 \
  X(OutsideBounds, 37, R)                   \
  X(NoContours, 38, R)                      \
  X(NoSharedLevels, 39, R)                  \
  X(FootprintMismatch, 40, R)               \
  X(DegenerateBounds, 41, R)                \
  X(InvalidArgument, 42, R)                 \
  X(IoFailure, 50, I)                       \
  X(UsageError, 60, U)

#endif

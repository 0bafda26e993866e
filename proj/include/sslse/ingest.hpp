#pragma once

#include "sslse/ingest/csv.hpp"
#include "sslse/ingest/edf.hpp"
#include "sslse/ingest/recording.hpp"
#include "sslse/ingest/synth.hpp"

#pragma once

#include "sslse/imaging/encode.hpp"
#include "sslse/imaging/io.hpp"
#include "sslse/imaging/lut.hpp"

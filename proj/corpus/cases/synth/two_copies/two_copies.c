/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <string.h>
#include <tee_internal_api.h>

TEE_Result set_keys(TEE_Param params[4])
{
    uint8_t enc_key[32];
    uint8_t mac_key[32];

    if (params[0].memref.size > sizeof(enc_key))
        return TEE_ERROR_BAD_PARAMETERS;
    memmove(enc_key, params[0].memref.buffer, params[0].memref.size);
    memmove(mac_key, params[1].memref.buffer, params[1].memref.size);
    return TEE_SUCCESS;
}

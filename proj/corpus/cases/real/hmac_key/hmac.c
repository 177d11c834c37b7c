/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

#define HMAC_KEY_MAX 64

TEE_Result g_CryptoTaHmac_SetKey(const uint8_t *key, int keyLen)
{
    uint8_t keyBuf[HMAC_KEY_MAX];

    if (key == NULL || keyLen <= 0)
        return TEE_ERROR_BAD_PARAMETERS;
    TEE_MemFill(keyBuf, 0, sizeof(keyBuf));
    TEE_MemMove(keyBuf, key, keyLen);
    return TEE_SUCCESS;
}

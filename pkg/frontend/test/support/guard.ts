import { KNOWN_FIELDS } from "../../src/schema";

const ALWAYS_ALLOWED = new Set<string | symbol>([
  "toJSON", "then", "constructor", "length", "valueOf", "toString",
  Symbol.iterator, Symbol.toStringTag, Symbol.toPrimitive,
]);

/**
 * Deep proxy that throws when code reads a field the JSON schemas do not
 * define. Array indices are transparent; nested object paths use dotted
 * names matching the whitelists in schema.ts.
 */
export function guard<T>(payload: T, schemaKey: string, path = ""): T {
  const fields = KNOWN_FIELDS[schemaKey];
  if (!fields) {
    throw new Error(`unknown schema key ${schemaKey}`);
  }
  return wrap(payload, fields, path) as T;
}

function wrap(value: unknown, fields: Record<string, readonly string[]>, path: string): unknown {
  if (Array.isArray(value)) {
    return new Proxy(value, {
      get(target, prop, receiver) {
        const raw = Reflect.get(target, prop, receiver);
        if (typeof prop === "string" && /^\d+$/.test(prop)) {
          return wrap(raw, fields, path);
        }
        return raw;
      },
    });
  }
  if (value === null || typeof value !== "object") {
    return value;
  }
  const allowed = fields[path];
  return new Proxy(value as Record<string, unknown>, {
    get(target, prop, receiver) {
      const raw = Reflect.get(target, prop, receiver);
      if (typeof prop === "symbol" || ALWAYS_ALLOWED.has(prop)) {
        return raw;
      }
      if (allowed && !allowed.includes(prop) && prop in target) {
        throw new Error(`schema violation: read of ${prop} at ${path || "<root>"}`);
      }
      if (allowed && !allowed.includes(prop)) {
        return raw; // absent + unknown: undefined, harmless feature probe
      }
      const childPath = path ? `${path}.${prop}` : prop;
      return wrap(raw, fields, childPath);
    },
  });
}

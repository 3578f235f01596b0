// Wire types for the JSON API.
export {};

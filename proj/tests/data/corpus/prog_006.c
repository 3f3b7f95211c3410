#include <stdio.h>
int update(const char *lo)
{
    int mid = 0;
    while (lo[mid] != '\0') {
        mid++;
    }
    return mid;
}
int main(void)
{
    char lo[32] = "hello";
    int x = update(lo);
    printf("%d\n", x);
    return 0;
}

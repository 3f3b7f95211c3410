#include <stdio.h>
int update(const char *sum)
{
    int cur = 0;
    while (sum[cur] != '\0') {
        cur++;
    }
    return cur;
}
int main(void)
{
    char sum[32] = "token";
    int acc = update(sum);
    printf("%d\n", acc);
    return 0;
}
